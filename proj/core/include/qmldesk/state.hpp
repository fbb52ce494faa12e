#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"

namespace qmldesk {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr int kDefaultQubitCap = 20;

// Maximum number of simulated qubits. Reads QMLDESK_QUBIT_CAP from the
// environment; falls back to the default desk-scale cap of 20.
int qubit_cap();

// Dense statevector over `num_qubits` qubits. Bit convention: qubit 0 is the
// most significant bit of the basis index, so for 3 qubits the basis state
// |q0 q1 q2> = |011> has index 0b011 = 3.
class QuantumState {
 public:
  QuantumState(int num_qubits, Eigen::VectorXcd amplitudes);

  static QuantumState zero(int num_qubits);
  static QuantumState basis(int num_qubits, std::uint64_t index);
  // Normalises before constructing; throws ZeroVector on a null vector.
  static QuantumState from_unnormalized(int num_qubits, const Eigen::VectorXcd& amplitudes);

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dim() const { return static_cast<std::uint64_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::uint64_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }

  // <this|other>
  Complex inner(const QuantumState& other) const;
  // |this> (x) |other>; qubits of `other` follow qubits of `this`.
  QuantumState tensor(const QuantumState& other) const;

 private:
  int num_qubits_;
  Eigen::VectorXcd amplitudes_;
};

// Amplitude encoding of a classical vector: |x> = (1/|x|) sum_i x_i |i>,
// zero-padded to the next power of two. Charges one state-preparation event
// on the ledger and records the asymptotic loading cost symbolically.
QuantumState prepare_amplitude_state(const Eigen::VectorXd& x, ResourceLedger& ledger);
QuantumState prepare_amplitude_state(const Eigen::VectorXcd& x, ResourceLedger& ledger);

// Exact marginal distribution of the listed qubits (most significant first in
// the returned bitstring order). Probabilities are indexed by the integer
// value of the measured bitstring.
std::vector<double> measure_probabilities(const QuantumState& state, const std::vector<int>& targets);

// Samples `shots` measurements of the listed qubits and returns a histogram
// keyed by bitstring. Charges `shots` on the ledger.
std::map<std::string, std::int64_t> measure_qubits(const QuantumState& state,
                                                   const std::vector<int>& targets,
                                                   RandomSource& rng, std::int64_t shots,
                                                   ResourceLedger& ledger);

std::string index_to_bitstring(std::uint64_t index, int num_bits);

}  // namespace qmldesk
