#include "qmldesk/swap_test.hpp"

#include <cmath>

#include "qmldesk/errors.hpp"
#include "qmldesk/gates.hpp"

namespace qmldesk {

double swap_test_probability(const QuantumState& a, const QuantumState& b) {
  const double overlap = std::abs(a.inner(b));
  return 0.5 * (1.0 + overlap * overlap);
}

namespace {

QuantumState build_swap_test_state(const QuantumState& a, const QuantumState& b,
                                   ResourceLedger& ledger) {
  if (a.num_qubits() != b.num_qubits())
    throw DimensionMismatch("swap test: register sizes differ");
  const int n = a.num_qubits();
  QuantumState state = QuantumState::zero(1).tensor(a).tensor(b);
  const GateOp h(gates::hadamard(), {0});
  state = apply_unitary(state, h, ledger);
  for (int q = 0; q < n; ++q)
    state = apply_unitary(state, GateOp(gates::cswap(), {0, 1 + q, 1 + n + q}), ledger);
  state = apply_unitary(state, h, ledger);
  return state;
}

}  // namespace

double swap_test_circuit_probability(const QuantumState& a, const QuantumState& b,
                                     ResourceLedger& ledger) {
  const QuantumState state = build_swap_test_state(a, b, ledger);
  return measure_probabilities(state, {0})[0];
}

SwapTestEstimate swap_test_sample(const QuantumState& a, const QuantumState& b,
                                  std::int64_t shots, RandomSource& rng,
                                  ResourceLedger& ledger) {
  const QuantumState state = build_swap_test_state(a, b, ledger);
  const auto histogram = measure_qubits(state, {0}, rng, shots, ledger);
  SwapTestEstimate est;
  est.shots = shots;
  const auto it = histogram.find("0");
  const std::int64_t zeros = it == histogram.end() ? 0 : it->second;
  est.p_hat = static_cast<double>(zeros) / static_cast<double>(shots);
  return est;
}

}  // namespace qmldesk
