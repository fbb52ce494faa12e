#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/density.hpp"
#include "qmldesk/errors.hpp"
#include "qmldesk/gates.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"
#include "qmldesk/state.hpp"
#include "qmldesk/swap_test.hpp"
#include "support/oracles.hpp"

using namespace qmldesk;

namespace {

// Upper 0.001 quantiles of the chi-square distribution, frozen from standard
// tables: df = 9 and df = 3.
constexpr double kChiSquare9 = 27.877;
constexpr double kChiSquare3 = 16.266;

Eigen::MatrixXcd random_density_entries(int dim, RandomSource& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(rng.normal(), rng.normal());
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("raw engine stream is deterministic per seed") {
  RandomSource a(99);
  RandomSource b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomSource c(100);
  bool all_equal = true;
  RandomSource a2(99);
  for (int i = 0; i < 10; ++i) all_equal = all_equal && (a2.next_u64() == c.next_u64());
  CHECK_FALSE(all_equal);
}

TEST_CASE("seed derivation matches the published splitmix64 sequence") {
  std::uint64_t state = 1234567;
  CHECK(splitmix64(state) == 6457827717110365317ull);
  CHECK(splitmix64(state) == 3203168211198807973ull);
  CHECK(splitmix64(state) == 9817491932198370423ull);
}

TEST_CASE("split streams ignore parent consumption") {
  RandomSource parent(7);
  RandomSource before = parent.split(42);
  for (int i = 0; i < 1000; ++i) parent.uniform();
  RandomSource after = parent.split(42);
  for (int i = 0; i < 50; ++i) CHECK(before.next_u64() == after.next_u64());

  // Distinct labels give distinct streams.
  RandomSource other = parent.split(43);
  RandomSource base = parent.split(42);
  int disagreements = 0;
  for (int i = 0; i < 50; ++i)
    if (base.next_u64() != other.next_u64()) ++disagreements;
  CHECK(disagreements > 40);
}

TEST_CASE("uniform doubles stay in range and pass a uniformity screen") {
  RandomSource rng(5);
  std::vector<std::int64_t> counts(10, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    ++counts[static_cast<std::size_t>(u * 10.0)];
  }
  CHECK(oracles::chi_square_uniform(counts, draws) < kChiSquare9);
}

TEST_CASE("uniform_int is unbiased over a non-power-of-two range") {
  RandomSource rng(6);
  std::vector<std::int64_t> counts(10, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = rng.uniform_int(10);
    REQUIRE(v < 10);
    ++counts[v];
  }
  CHECK(oracles::chi_square_uniform(counts, draws) < kChiSquare9);
}

TEST_CASE("normal draws have the right first moments") {
  RandomSource rng(8);
  const int draws = 50000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("bernoulli respects degenerate probabilities") {
  RandomSource rng(9);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("discrete sampling follows the weight vector") {
  RandomSource rng(10);
  const std::vector<double> weights = {1.0, 2.0, 3.0, 4.0};
  std::vector<std::int64_t> counts(4, 0);
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) ++counts[rng.discrete(weights)];
  double stat = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double expected = draws * weights[static_cast<std::size_t>(k)] / 10.0;
    const double d = static_cast<double>(counts[static_cast<std::size_t>(k)]) - expected;
    stat += d * d / expected;
  }
  CHECK(stat < kChiSquare3);
}

TEST_CASE("ledger counters accumulate and merge") {
  ResourceLedger ledger;
  ledger.charge_qubits(3);
  ledger.charge_qubits(7);
  ledger.charge_qubits(5);
  ledger.charge_gates(4);
  ledger.charge_oracle_queries(2);
  ledger.charge_shots(100);
  ledger.charge_state_preparations();
  ledger.note_symbolic_cost("loading");
  CHECK(ledger.qubits_peak() == 7);
  CHECK(ledger.gate_count() == 4);
  CHECK(ledger.oracle_queries() == 2);
  CHECK(ledger.shots() == 100);
  CHECK(ledger.state_preparations() == 1);
  REQUIRE(ledger.symbolic_costs().size() == 1);

  ResourceLedger other;
  other.charge_qubits(4);
  other.charge_gates(1);
  other.note_symbolic_cost("sampling");
  ledger.merge(other);
  CHECK(ledger.qubits_peak() == 7);
  CHECK(ledger.gate_count() == 5);
  CHECK(ledger.symbolic_costs().size() == 2);
}

TEST_CASE("basis states and tensor products use qubit 0 as the top bit") {
  const QuantumState zero = QuantumState::zero(2);
  CHECK(zero.amplitude(0) == Complex(1.0, 0.0));

  const QuantumState one = QuantumState::basis(1, 1);
  const QuantumState product = QuantumState::zero(1).tensor(one);  // |0>|1>
  CHECK(product.num_qubits() == 2);
  CHECK(std::abs(product.amplitude(0b01) - Complex(1.0, 0.0)) < 1e-15);

  const QuantumState flipped = one.tensor(QuantumState::zero(1));  // |1>|0>
  CHECK(std::abs(flipped.amplitude(0b10) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("state construction validates its inputs") {
  Eigen::VectorXcd bad_len(3);
  bad_len << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(QuantumState(2, bad_len), DimensionMismatch);

  Eigen::VectorXcd unnormalized(2);
  unnormalized << 3.0, 4.0;
  CHECK_THROWS_AS(QuantumState(1, unnormalized), InvalidState);
  const QuantumState fixed = QuantumState::from_unnormalized(1, unnormalized);
  CHECK(std::abs(fixed.amplitude(0).real() - 0.6) < 1e-15);
  CHECK(std::abs(fixed.amplitude(1).real() - 0.8) < 1e-15);

  CHECK_THROWS_AS(QuantumState::from_unnormalized(1, Eigen::VectorXcd::Zero(2)), ZeroVector);
}

TEST_CASE("amplitude preparation encodes, pads, and charges the ledger") {
  ResourceLedger ledger;
  Eigen::VectorXd x(3);
  x << 1.0, 2.0, 2.0;
  const QuantumState state = prepare_amplitude_state(x, ledger);
  CHECK(state.num_qubits() == 2);  // padded to length 4
  CHECK(std::abs(state.amplitude(0).real() - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(state.amplitude(1).real() - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(state.amplitude(3)) < 1e-15);
  CHECK(ledger.state_preparations() == 1);
  CHECK(ledger.symbolic_costs().size() == 1);

  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(prepare_amplitude_state(zeros, ledger), ZeroVector);
}

TEST_CASE("single-qubit gates act on the addressed qubit only") {
  ResourceLedger ledger;
  const QuantumState h0 =
      apply_unitary(QuantumState::zero(2), GateOp(gates::hadamard(), {0}), ledger);
  CHECK(std::abs(h0.amplitude(0b00) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
  CHECK(std::abs(h0.amplitude(0b10) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
  CHECK(std::abs(h0.amplitude(0b01)) < 1e-15);

  const QuantumState x1 =
      apply_unitary(QuantumState::zero(2), GateOp(gates::pauli_x(), {1}), ledger);
  CHECK(std::abs(x1.amplitude(0b01) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(ledger.gate_count() == 2);
}

TEST_CASE("controlled gates follow the target ordering convention") {
  ResourceLedger ledger;
  // cnot on {0,1}: qubit 0 controls, qubit 1 flips.
  QuantumState state = QuantumState::basis(2, 0b10);
  state = apply_unitary(state, GateOp(gates::cnot(), {0, 1}), ledger);
  CHECK(std::abs(state.amplitude(0b11) - Complex(1.0, 0.0)) < 1e-15);

  // Same gate with reversed targets: qubit 1 controls.
  QuantumState rev = QuantumState::basis(2, 0b10);
  rev = apply_unitary(rev, GateOp(gates::cnot(), {1, 0}), ledger);
  CHECK(std::abs(rev.amplitude(0b10) - Complex(1.0, 0.0)) < 1e-15);

  // Toffoli fires only when both controls are set.
  QuantumState ccx = QuantumState::basis(3, 0b110);
  ccx = apply_unitary(ccx, GateOp(gates::toffoli(), {0, 1, 2}), ledger);
  CHECK(std::abs(ccx.amplitude(0b111) - Complex(1.0, 0.0)) < 1e-15);

  CHECK(gates::controlled(gates::pauli_x()).isApprox(gates::cnot(), 1e-15));
}

TEST_CASE("gate construction rejects bad shapes and targets") {
  Eigen::MatrixXcd not_unitary = Eigen::MatrixXcd::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(GateOp(not_unitary, {0}), NonUnitaryGate);

  ResourceLedger ledger;
  CHECK_THROWS_AS(
      apply_unitary(QuantumState::zero(2), GateOp(gates::pauli_x(), {2}), ledger),
      TargetOutOfRange);
}

TEST_CASE("fourier transform matches its defining formula and is unitary") {
  const int n = 3;
  const Eigen::MatrixXcd f = gates::fourier(n);
  const double m = 8.0;
  for (int j = 0; j < 8; ++j)
    for (int k = 0; k < 8; ++k) {
      const Complex expected =
          std::exp(Complex(0.0, 2.0 * M_PI * j * k / m)) / std::sqrt(m);
      CHECK(std::abs(f(k, j) - expected) < 1e-12);
    }
  CHECK((f * f.adjoint()).isApprox(Eigen::MatrixXcd::Identity(8, 8), 1e-12));
}

TEST_CASE("measurement marginals and sampling agree with the amplitudes") {
  ResourceLedger ledger;
  // Bell pair on qubits {0,1}.
  QuantumState bell = QuantumState::zero(2);
  bell = apply_unitary(bell, GateOp(gates::hadamard(), {0}), ledger);
  bell = apply_unitary(bell, GateOp(gates::cnot(), {0, 1}), ledger);

  const std::vector<double> joint = measure_probabilities(bell, {0, 1});
  CHECK(std::abs(joint[0] - 0.5) < 1e-12);
  CHECK(std::abs(joint[3] - 0.5) < 1e-12);
  CHECK(std::abs(joint[1]) < 1e-15);

  const std::vector<double> marginal = measure_probabilities(bell, {1});
  CHECK(std::abs(marginal[0] - 0.5) < 1e-12);

  RandomSource rng(3);
  const auto histogram = measure_qubits(bell, {0, 1}, rng, 1000, ledger);
  std::int64_t total = 0;
  for (const auto& [key, count] : histogram) {
    total += count;
    CHECK((key == "00" || key == "11"));
  }
  CHECK(total == 1000);
  CHECK(ledger.shots() == 1000);
}

TEST_CASE("fixed-seed sampling reproduces the identical histogram") {
  ResourceLedger ledger;
  QuantumState state = QuantumState::zero(3);
  for (int q = 0; q < 3; ++q)
    state = apply_unitary(state, GateOp(gates::hadamard(), {q}), ledger);

  RandomSource first(42);
  RandomSource second(42);
  const auto histogram_a = measure_qubits(state, {0, 1, 2}, first, 5000, ledger);
  const auto histogram_b = measure_qubits(state, {0, 1, 2}, second, 5000, ledger);
  CHECK(histogram_a == histogram_b);
}

TEST_CASE("qubit cap reads the environment override") {
  CHECK(qubit_cap() == kDefaultQubitCap);
  setenv("QMLDESK_QUBIT_CAP", "4", 1);
  CHECK(qubit_cap() == 4);
  CHECK_THROWS_AS(QuantumState::zero(5), DimensionOverflow);
  unsetenv("QMLDESK_QUBIT_CAP");
  CHECK(qubit_cap() == kDefaultQubitCap);
}

TEST_CASE("density matrices validate and expose purity") {
  Eigen::MatrixXcd not_hermitian(2, 2);
  not_hermitian << 0.5, 0.5, -0.5, 0.5;
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, Error);

  Eigen::MatrixXcd wrong_trace = Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{wrong_trace}, Error);

  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  CHECK(std::abs(mixed.purity() - 0.25) < 1e-12);

  const DensityMatrix pure = DensityMatrix::from_state(QuantumState::basis(2, 2));
  CHECK(std::abs(pure.purity() - 1.0) < 1e-12);
}

TEST_CASE("partial trace agrees with an independent reference") {
  RandomSource rng(12);
  const DensityMatrix rho{random_density_entries(8, rng)};
  for (const std::vector<int>& keep :
       {std::vector<int>{0}, std::vector<int>{2}, std::vector<int>{0, 2},
        std::vector<int>{1, 2}}) {
    const DensityMatrix reduced = partial_trace(rho, keep);
    const Eigen::MatrixXcd expected = oracles::partial_trace(rho.entries(), 3, keep);
    CHECK((reduced.entries() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(partial_trace(rho, {}), EmptyKeepSet);
}

TEST_CASE("reduced density of a pure state matches the outer-product route") {
  ResourceLedger ledger;
  QuantumState state = QuantumState::zero(3);
  state = apply_unitary(state, GateOp(gates::hadamard(), {0}), ledger);
  state = apply_unitary(state, GateOp(gates::cnot(), {0, 2}), ledger);

  const DensityMatrix direct = reduced_density(state, {0, 2});
  const Eigen::MatrixXcd full = state.amplitudes() * state.amplitudes().adjoint();
  const Eigen::MatrixXcd expected = oracles::partial_trace(full, 3, {0, 2});
  CHECK((direct.entries() - expected).cwiseAbs().maxCoeff() < 1e-12);

  // Entangled halves of the pair are maximally mixed.
  const DensityMatrix half = reduced_density(state, {2});
  CHECK(std::abs(half.purity() - 0.5) < 1e-12);
}

TEST_CASE("swap test probability matches the closed form and the circuit") {
  ResourceLedger ledger;
  const QuantumState a = QuantumState::basis(2, 0);
  const QuantumState b = QuantumState::basis(2, 1);
  CHECK(std::abs(swap_test_probability(a, a) - 1.0) < 1e-12);
  CHECK(std::abs(swap_test_probability(a, b) - 0.5) < 1e-12);

  RandomSource rng(4);
  Eigen::VectorXcd raw(4);
  raw << Complex(0.5, 0.1), Complex(-0.3, 0.2), Complex(0.0, 0.7), Complex(0.2, -0.1);
  const QuantumState c = QuantumState::from_unnormalized(2, raw);
  const double closed = swap_test_probability(a, c);
  const double circuit = swap_test_circuit_probability(a, c, ledger);
  CHECK(std::abs(closed - circuit) < 1e-12);
  CHECK(ledger.gate_count() > 0);

  const SwapTestEstimate estimate = swap_test_sample(a, c, 20000, rng, ledger);
  CHECK(std::abs(estimate.p_hat - closed) < 0.02);
  CHECK(estimate.shots == 20000);
}
