#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/boltzmann.hpp"
#include "qmldesk/errors.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"
#include "support/oracles.hpp"

using namespace qmldesk;

namespace {

BoltzmannMachine zero_machine(int n_v, int n_h) {
  return {Eigen::VectorXd::Zero(n_v), Eigen::VectorXd::Zero(n_h),
          Eigen::MatrixXd::Zero(n_v, n_h)};
}

BoltzmannMachine random_machine(int n_v, int n_h, RandomSource& rng, double scale = 0.8) {
  BoltzmannMachine bm = zero_machine(n_v, n_h);
  for (int i = 0; i < n_v; ++i) bm.visible_bias(i) = scale * rng.normal();
  for (int j = 0; j < n_h; ++j) bm.hidden_bias(j) = scale * rng.normal();
  for (int i = 0; i < n_v; ++i)
    for (int j = 0; j < n_h; ++j) bm.weights(i, j) = scale * rng.normal();
  return bm;
}

Eigen::VectorXd bits_vector(std::uint32_t mask, int width) {
  Eigen::VectorXd v(width);
  for (int i = 0; i < width; ++i) v(i) = (mask >> (width - 1 - i)) & 1u ? 1.0 : 0.0;
  return v;
}

BinaryDataset random_dataset(int n_v, RandomSource& rng) {
  BinaryDataset data;
  const int rows = 2 + static_cast<int>(rng.uniform_int(3));
  for (int r = 0; r < rows; ++r)
    data.add(bits_vector(static_cast<std::uint32_t>(rng.uniform_int(1u << n_v)), n_v),
             0.5 + rng.uniform());
  return data;
}

double gradient_norm(const BoltzmannGradient& g) {
  return std::sqrt(g.visible_bias.squaredNorm() + g.hidden_bias.squaredNorm() +
                   g.weights.squaredNorm());
}

// Dataset whose pattern weights equal the machine's own visible marginals,
// which makes the log-likelihood stationary.
BinaryDataset marginal_dataset(const BoltzmannMachine& bm) {
  const GibbsTable table = gibbs_distribution(bm);
  BinaryDataset data;
  const int n_v = table.n_v;
  for (std::uint32_t v = 0; v < (1u << n_v); ++v) {
    double mass = 0.0;
    for (std::uint32_t h = 0; h < (1u << table.n_h); ++h)
      mass += table.probabilities[(v << table.n_h) | h];
    if (mass > 0.0) data.add(bits_vector(v, n_v), mass);
  }
  return data;
}

}  // namespace

TEST_CASE("the energy function is the negated bias and coupling sum") {
  BoltzmannMachine bm = zero_machine(1, 1);
  bm.visible_bias << 1.0;
  bm.hidden_bias << 1.0;
  bm.weights << 1.0;
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(boltzmann_energy(bm, one, one) == doctest::Approx(-3.0).epsilon(1e-14));
  Eigen::VectorXd zero(1);
  zero << 0.0;
  CHECK(boltzmann_energy(bm, zero, zero) == 0.0);
  CHECK_THROWS_AS(boltzmann_energy(bm, Eigen::VectorXd::Zero(2), one), DimensionMismatch);
}

TEST_CASE("zero parameters give the uniform joint distribution") {
  const GibbsTable table = gibbs_distribution(zero_machine(1, 1));
  REQUIRE(table.probabilities.size() == 4);
  for (double p : table.probabilities) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(table.log_partition == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("gibbs probabilities are the softmax of the negated energies") {
  RandomSource rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const int n_v = 1 + static_cast<int>(rng.uniform_int(3));
    const int n_h = 1 + static_cast<int>(rng.uniform_int(3));
    const BoltzmannMachine bm = random_machine(n_v, n_h, rng);
    const GibbsTable table = gibbs_distribution(bm);

    double total = 0.0;
    for (double p : table.probabilities) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);

    // Pairwise ratios match e^{-E} ratios; a uniform energy shift cancels.
    const std::uint32_t states = 1u << (n_v + n_h);
    const std::uint32_t a = rng.uniform_int(states);
    const std::uint32_t b = rng.uniform_int(states);
    const double ea = boltzmann_energy(bm, bits_vector(a >> n_h, n_v),
                                       bits_vector(a & ((1u << n_h) - 1), n_h));
    const double eb = boltzmann_energy(bm, bits_vector(b >> n_h, n_v),
                                       bits_vector(b & ((1u << n_h) - 1), n_h));
    const double ratio = table.probabilities[a] / table.probabilities[b];
    CHECK(ratio == doctest::Approx(std::exp(eb - ea)).epsilon(1e-10));
  }
}

TEST_CASE("machine shape and size caps are enforced") {
  CHECK_THROWS_AS(gibbs_distribution(zero_machine(0, 1)), Error);
  CHECK_THROWS_AS(gibbs_distribution(zero_machine(12, 9)), SizeCapExceeded);
  BoltzmannMachine bad = zero_machine(2, 2);
  bad.weights = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(gibbs_distribution(bad), DimensionMismatch);
}

TEST_CASE("binary datasets merge duplicates and validate entries") {
  BinaryDataset data;
  data.add(bits_vector(0b10, 2), 1.0);
  data.add(bits_vector(0b01, 2), 1.0);
  data.add(bits_vector(0b10, 2), 2.0);
  REQUIRE(data.size() == 2);
  CHECK(data.weight(0) == doctest::Approx(0.75));
  CHECK(data.weight(1) == doctest::Approx(0.25));
  CHECK(data.pattern(0)(0) == 1.0);
  CHECK(data.dimension() == 2);

  Eigen::VectorXd fractional(2);
  fractional << 0.5, 1.0;
  CHECK_THROWS_AS(data.add(fractional, 1.0), InvalidState);
  CHECK_THROWS_AS(data.add(bits_vector(1, 1), 1.0), DimensionMismatch);
  CHECK_THROWS_AS(data.add(bits_vector(0, 2), -1.0), Error);
  CHECK_THROWS_AS(BinaryDataset{}.add(Eigen::VectorXd::Zero(40), 1.0), SizeCapExceeded);
}

TEST_CASE("the all-ones pattern under zero parameters has the hand-computed gradient") {
  BinaryDataset data;
  data.add(bits_vector(0b1, 1));
  const BoltzmannGradient g = exact_gradient(zero_machine(1, 1), data);
  CHECK(g.weights(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g.visible_bias(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(g.hidden_bias(0)) < 1e-12);
}

TEST_CASE("the gradient vanishes when the data already matches the model") {
  RandomSource rng(82);
  for (int trial = 0; trial < 5; ++trial) {
    const BoltzmannMachine bm = random_machine(2, 2, rng);
    const BoltzmannGradient g = exact_gradient(bm, marginal_dataset(bm));
    CHECK(gradient_norm(g) < 1e-10);
  }
}

TEST_CASE("the gradient matches centered finite differences of the log-likelihood") {
  RandomSource rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const int n_v = 1 + static_cast<int>(rng.uniform_int(3));
    const int n_h = 1 + static_cast<int>(rng.uniform_int(2));
    BoltzmannMachine bm = random_machine(n_v, n_h, rng);
    const BinaryDataset data = random_dataset(n_v, rng);
    const BoltzmannGradient g = exact_gradient(bm, data);

    auto check_entry = [&](double* parameter, double analytic) {
      const double derivative = oracles::finite_difference(
          [&](double x) {
            const double saved = *parameter;
            *parameter = x;
            const double value = log_likelihood(bm, data);
            *parameter = saved;
            return value;
          },
          *parameter);
      const double scale = std::max(1.0, std::abs(derivative));
      CHECK(std::abs(analytic - derivative) / scale < 1e-6);
    };

    for (int i = 0; i < n_v; ++i) check_entry(&bm.visible_bias(i), g.visible_bias(i));
    for (int j = 0; j < n_h; ++j) check_entry(&bm.hidden_bias(j), g.hidden_bias(j));
    for (int i = 0; i < n_v; ++i)
      for (int j = 0; j < n_h; ++j) check_entry(&bm.weights(i, j), g.weights(i, j));
  }
}

TEST_CASE("mean-field magnetizations converge with a shrinking residual") {
  RandomSource rng(84);
  for (int trial = 0; trial < 10; ++trial) {
    const BoltzmannMachine bm = random_machine(3, 2, rng);
    const MeanFieldSolution sol = mean_field_magnetizations(bm);
    CHECK(sol.residual < 1e-8);
    CHECK(sol.sweeps <= 500);
    REQUIRE(!sol.residual_trace.empty());
    // Damped iteration: the recorded residuals shrink monotonically.
    for (std::size_t i = 1; i < sol.residual_trace.size(); ++i)
      CHECK(sol.residual_trace[i] <= sol.residual_trace[i - 1] + 1e-12);
    for (int i = 0; i < 3; ++i) {
      CHECK(sol.visible(i) > 0.0);
      CHECK(sol.visible(i) < 1.0);
    }
  }
}

TEST_CASE("mean field is exact for uncoupled machines and biased when strongly coupled") {
  RandomSource rng(85);
  BoltzmannMachine uncoupled = zero_machine(2, 2);
  uncoupled.visible_bias << 0.3, -0.4;
  uncoupled.hidden_bias << 0.1, 0.7;
  const BinaryDataset data = random_dataset(2, rng);
  const BoltzmannGradient exact = exact_gradient(uncoupled, data);
  const BoltzmannGradient mf = mean_field_gradient(uncoupled, data);
  CHECK(std::abs(gradient_norm(exact) - gradient_norm(mf)) < 1e-8);
  CHECK((exact.weights - mf.weights).norm() < 1e-8);

  BoltzmannMachine coupled = zero_machine(2, 2);
  coupled.weights.setConstant(5.0);
  const BoltzmannGradient exact_strong = exact_gradient(coupled, data);
  const BoltzmannGradient mf_strong = mean_field_gradient(coupled, data);
  const double gap = std::sqrt(
      (exact_strong.visible_bias - mf_strong.visible_bias).squaredNorm() +
      (exact_strong.hidden_bias - mf_strong.hidden_bias).squaredNorm() +
      (exact_strong.weights - mf_strong.weights).squaredNorm());
  CHECK(gap > 0.0);
}

TEST_CASE("training ascends the log-likelihood and records the whole trace") {
  RandomSource rng(86);
  ResourceLedger ledger;
  BinaryDataset data;
  data.add(bits_vector(0b101, 3));

  TrainConfig config;
  config.steps = 500;
  config.learning_rate = 0.1;
  const TrainResult result = train_bm(zero_machine(3, 2), data, config, ledger);
  REQUIRE(result.log_likelihood_trace.size() == 501);
  CHECK(result.log_likelihood_trace.back() > result.log_likelihood_trace.front());

  // Small steps keep the exact-backend trace monotone on almost every step.
  TrainConfig gentle;
  gentle.steps = 200;
  gentle.learning_rate = 0.01;
  const TrainResult smooth =
      train_bm(random_machine(2, 2, rng), random_dataset(2, rng), gentle, ledger);
  int drops = 0;
  for (std::size_t i = 1; i < smooth.log_likelihood_trace.size(); ++i)
    if (smooth.log_likelihood_trace[i] < smooth.log_likelihood_trace[i - 1] - 1e-12) ++drops;
  CHECK(drops <= 10);
}

TEST_CASE("training from a stationary point stays put") {
  RandomSource rng(87);
  ResourceLedger ledger;
  const BoltzmannMachine bm = random_machine(2, 2, rng);
  TrainConfig config;
  config.steps = 50;
  config.learning_rate = 0.01;
  const TrainResult result = train_bm(bm, marginal_dataset(bm), config, ledger);
  for (std::size_t i = 1; i < result.log_likelihood_trace.size(); ++i)
    CHECK(result.log_likelihood_trace[i] >= result.log_likelihood_trace[i - 1] - 1e-10);
  CHECK(std::abs(result.log_likelihood_trace.back() - result.log_likelihood_trace.front()) <
        1e-8);
}

TEST_CASE("the exact backend usually out-trains the mean-field backend") {
  RandomSource rng(88);
  ResourceLedger ledger;

  // Per instance either backend can lead at a finite step count; the quality
  // claim is statistical, so count wins over a small population.
  int exact_wins = 0;
  const int instances = 12;
  for (int inst = 0; inst < instances; ++inst) {
    const BoltzmannMachine start = random_machine(2, 2, rng, 0.5);
    const BinaryDataset data = random_dataset(2, rng);

    TrainConfig exact_config;
    exact_config.steps = 2000;
    exact_config.learning_rate = 0.25;
    const TrainResult exact = train_bm(start, data, exact_config, ledger);

    TrainConfig mf_config = exact_config;
    mf_config.backend = GradientBackend::mean_field;
    try {
      const TrainResult mf = train_bm(start, data, mf_config, ledger);
      if (exact.log_likelihood_trace.back() >= mf.log_likelihood_trace.back() - 1e-6)
        ++exact_wins;
    } catch (const MeanFieldNonConvergence&) {
      ++exact_wins;
    }

    // Both backends report the exactly evaluated likelihood in the trace.
    CHECK(std::abs(log_likelihood(exact.machine, data) - exact.log_likelihood_trace.back()) <
          1e-12);
  }
  CHECK(exact_wins >= 8);
}

TEST_CASE("the quantum sampler's symbolic cost is ledgered when a scaling factor is given") {
  RandomSource rng(89);
  ResourceLedger ledger;
  BinaryDataset data;
  data.add(bits_vector(0b1, 1));
  TrainConfig config;
  config.steps = 1;
  config.kappa = 4.0;
  train_bm(zero_machine(1, 1), data, config, ledger);
  REQUIRE(!ledger.symbolic_costs().empty());

  CHECK_THROWS_AS(train_bm(zero_machine(1, 1), data, {GradientBackend::exact, -1, 0.1, {}},
                           ledger),
                  Error);
  CHECK_THROWS_AS(train_bm(zero_machine(1, 1), BinaryDataset{}, config, ledger),
                  EmptyTrainingSet);
}
