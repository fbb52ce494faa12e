#include "qmldesk/state.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "qmldesk/errors.hpp"

namespace qmldesk {

namespace {

int parse_cap(const char* text) {
  if (text == nullptr || *text == '\0') return kDefaultQubitCap;
  char* end = nullptr;
  const long value = std::strtol(text, &end, 10);
  if (end == text || *end != '\0' || value < 1 || value > 30) return kDefaultQubitCap;
  return static_cast<int>(value);
}

void check_qubit_count(int num_qubits) {
  if (num_qubits < 1) throw Error("state: need at least one qubit");
  if (num_qubits > qubit_cap())
    throw DimensionOverflow("state: " + std::to_string(num_qubits) + " qubits exceeds cap of " +
                            std::to_string(qubit_cap()));
}

}  // namespace

int qubit_cap() { return parse_cap(std::getenv("QMLDESK_QUBIT_CAP")); }

QuantumState::QuantumState(int num_qubits, Eigen::VectorXcd amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  check_qubit_count(num_qubits_);
  const auto expected = static_cast<Eigen::Index>(1) << num_qubits_;
  if (amplitudes_.size() != expected)
    throw DimensionMismatch("state: amplitude vector has length " +
                            std::to_string(amplitudes_.size()) + ", expected " +
                            std::to_string(expected));
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance)
    throw InvalidState("state: norm " + std::to_string(norm) + " is not 1 within tolerance");
}

QuantumState QuantumState::zero(int num_qubits) { return basis(num_qubits, 0); }

QuantumState QuantumState::basis(int num_qubits, std::uint64_t index) {
  check_qubit_count(num_qubits);
  const auto dim = static_cast<std::uint64_t>(1) << num_qubits;
  if (index >= dim)
    throw TargetOutOfRange("state: basis index " + std::to_string(index) +
                           " out of range for dimension " + std::to_string(dim));
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  amps(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(num_qubits, std::move(amps));
}

QuantumState QuantumState::from_unnormalized(int num_qubits, const Eigen::VectorXcd& amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw ZeroVector("state: cannot normalise the zero vector");
  return QuantumState(num_qubits, amplitudes / norm);
}

Complex QuantumState::inner(const QuantumState& other) const {
  if (num_qubits_ != other.num_qubits_)
    throw DimensionMismatch("inner product: qubit counts differ");
  return amplitudes_.dot(other.amplitudes_);
}

QuantumState QuantumState::tensor(const QuantumState& other) const {
  const int total = num_qubits_ + other.num_qubits_;
  check_qubit_count(total);
  Eigen::VectorXcd out(amplitudes_.size() * other.amplitudes_.size());
  for (Eigen::Index i = 0; i < amplitudes_.size(); ++i)
    out.segment(i * other.amplitudes_.size(), other.amplitudes_.size()) =
        amplitudes_(i) * other.amplitudes_;
  return QuantumState(total, std::move(out));
}

namespace {

QuantumState prepare_impl(const Eigen::VectorXcd& x, ResourceLedger& ledger) {
  if (x.size() == 0) throw ZeroVector("amplitude encoding: empty vector");
  const double norm = x.norm();
  if (norm == 0.0) throw ZeroVector("amplitude encoding: zero vector has no direction");
  int num_qubits = 1;
  while ((static_cast<Eigen::Index>(1) << num_qubits) < x.size()) {
    ++num_qubits;
    if (num_qubits > qubit_cap())
      throw DimensionOverflow("amplitude encoding: padded dimension for length " +
                              std::to_string(x.size()) + " exceeds the " +
                              std::to_string(qubit_cap()) + "-qubit cap");
  }
  const auto dim = static_cast<Eigen::Index>(1) << num_qubits;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  amps.head(x.size()) = x / norm;
  ledger.charge_qubits(num_qubits);
  ledger.charge_state_preparations();
  ledger.note_symbolic_cost("amplitude encoding of length-" + std::to_string(x.size()) +
                            " vector: O(sqrt(n)) steps, O(polylog n) with amplitude-addressed "
                            "memory preprocessing");
  return QuantumState(num_qubits, std::move(amps));
}

}  // namespace

QuantumState prepare_amplitude_state(const Eigen::VectorXd& x, ResourceLedger& ledger) {
  return prepare_impl(x.cast<Complex>(), ledger);
}

QuantumState prepare_amplitude_state(const Eigen::VectorXcd& x, ResourceLedger& ledger) {
  return prepare_impl(x, ledger);
}

namespace {

void check_targets(const QuantumState& state, const std::vector<int>& targets) {
  if (targets.empty()) throw EmptyKeepSet("measurement: no target qubits listed");
  std::vector<bool> seen(static_cast<std::size_t>(state.num_qubits()), false);
  for (int t : targets) {
    if (t < 0 || t >= state.num_qubits())
      throw TargetOutOfRange("measurement: qubit " + std::to_string(t) + " out of range");
    if (seen[static_cast<std::size_t>(t)])
      throw TargetOutOfRange("measurement: qubit " + std::to_string(t) + " listed twice");
    seen[static_cast<std::size_t>(t)] = true;
  }
}

}  // namespace

std::vector<double> measure_probabilities(const QuantumState& state,
                                          const std::vector<int>& targets) {
  check_targets(state, targets);
  const int n = state.num_qubits();
  const int k = static_cast<int>(targets.size());
  std::vector<double> probs(static_cast<std::size_t>(1) << k, 0.0);
  const auto& amps = state.amplitudes();
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    std::uint64_t outcome = 0;
    for (int j = 0; j < k; ++j) {
      const int bit_pos = n - 1 - targets[static_cast<std::size_t>(j)];
      outcome = (outcome << 1) | ((i >> bit_pos) & 1ULL);
    }
    probs[outcome] += std::norm(amps(static_cast<Eigen::Index>(i)));
  }
  return probs;
}

std::map<std::string, std::int64_t> measure_qubits(const QuantumState& state,
                                                   const std::vector<int>& targets,
                                                   RandomSource& rng, std::int64_t shots,
                                                   ResourceLedger& ledger) {
  if (shots < 1) throw Error("measurement: shots must be positive");
  const std::vector<double> probs = measure_probabilities(state, targets);
  DiscreteSampler sampler(probs);
  std::map<std::string, std::int64_t> histogram;
  const int k = static_cast<int>(targets.size());
  for (std::int64_t s = 0; s < shots; ++s) {
    const std::uint64_t outcome = sampler.sample(rng);
    ++histogram[index_to_bitstring(outcome, k)];
  }
  ledger.charge_qubits(state.num_qubits());
  ledger.charge_shots(shots);
  return histogram;
}

std::string index_to_bitstring(std::uint64_t index, int num_bits) {
  std::string out(static_cast<std::size_t>(num_bits), '0');
  for (int b = 0; b < num_bits; ++b)
    if ((index >> (num_bits - 1 - b)) & 1ULL) out[static_cast<std::size_t>(b)] = '1';
  return out;
}

}  // namespace qmldesk
