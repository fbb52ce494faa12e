#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qmldesk {

// Deterministic random source. All sampling primitives are implemented on
// top of the raw mt19937_64 output stream so that results are reproducible
// bit-for-bit across platforms and standard-library versions (the standard
// pins the engine's output sequence but not the distribution adaptors).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Next raw 64-bit engine word.
  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); unbiased via rejection. n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p);

  // Standard normal via Box-Muller (both values consumed per pair).
  double normal();

  // Samples an index from unnormalised non-negative weights by CDF inversion.
  std::size_t discrete(const std::vector<double>& weights);

  // Derives an independent stream from the *original* seed and a label.
  // The derived stream does not depend on how much of this stream has been
  // consumed, so concurrent consumers stay reproducible.
  RandomSource split(std::uint64_t label) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64 step; used for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Precomputed cumulative table for repeated draws from one distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights);

  std::size_t sample(RandomSource& rng) const;
  double total() const { return total_; }

 private:
  std::vector<double> cdf_;
  double total_ = 0.0;
};

}  // namespace qmldesk
