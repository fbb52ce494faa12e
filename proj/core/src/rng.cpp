#include "qmldesk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmldesk/errors.hpp"

namespace qmldesk {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RandomSource::next_u64() { return engine_(); }

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RandomSource::uniform_int(std::uint64_t n) {
  if (n == 0) throw Error("uniform_int: n must be positive");
  if (n == 1) return 0;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

bool RandomSource::bernoulli(double p) { return uniform() < p; }

double RandomSource::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(theta);
  have_spare_normal_ = true;
  return r * std::cos(theta);
}

std::size_t RandomSource::discrete(const std::vector<double>& weights) {
  DiscreteSampler sampler(weights);
  return sampler.sample(*this);
}

RandomSource RandomSource::split(std::uint64_t label) const {
  std::uint64_t state = seed_ ^ (0xa0761d6478bd642fULL + label);
  const std::uint64_t derived = splitmix64(state) ^ splitmix64(state);
  return RandomSource(derived);
}

DiscreteSampler::DiscreteSampler(const std::vector<double>& weights) {
  if (weights.empty()) throw Error("discrete sampler: empty weight vector");
  cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0)) throw Error("discrete sampler: negative or NaN weight");
    acc += w;
    cdf_[i] = acc;
  }
  total_ = acc;
  if (total_ <= 0.0) throw Error("discrete sampler: all weights are zero");
}

std::size_t DiscreteSampler::sample(RandomSource& rng) const {
  const double u = rng.uniform() * total_;
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
  return std::min(idx, cdf_.size() - 1);
}

}  // namespace qmldesk
