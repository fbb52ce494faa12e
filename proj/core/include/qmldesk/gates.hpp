#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qmldesk/ledger.hpp"
#include "qmldesk/state.hpp"

namespace qmldesk {

inline constexpr double kUnitaryTolerance = 1e-10;

// A dense unitary acting on an explicit list of qubits. Targets are listed
// most-significant-first with respect to the gate matrix's own basis: for a
// two-qubit gate on targets {a, b}, local basis index 0b10 means qubit `a`
// is 1 and qubit `b` is 0.
class GateOp {
 public:
  GateOp(Eigen::MatrixXcd matrix, std::vector<int> targets);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const std::vector<int>& targets() const { return targets_; }
  int arity() const { return static_cast<int>(targets_.size()); }

 private:
  Eigen::MatrixXcd matrix_;
  std::vector<int> targets_;
};

// Applies the gate and returns the new state. Charges one gate on the ledger.
QuantumState apply_unitary(const QuantumState& state, const GateOp& gate, ResourceLedger& ledger);

namespace gates {

Eigen::MatrixXcd identity(int num_qubits = 1);
Eigen::MatrixXcd pauli_x();
Eigen::MatrixXcd pauli_y();
Eigen::MatrixXcd pauli_z();
Eigen::MatrixXcd hadamard();
// diag(1, e^{i theta})
Eigen::MatrixXcd phase(double theta);
Eigen::MatrixXcd swap_gate();

// Adds one control qubit in front of the unitary's targets:
// |0><0| (x) I + |1><1| (x) u.
Eigen::MatrixXcd controlled(const Eigen::MatrixXcd& u);

Eigen::MatrixXcd cnot();
Eigen::MatrixXcd toffoli();
Eigen::MatrixXcd cswap();

// Discrete Fourier transform on `num_qubits` qubits:
// |j> -> (1/sqrt(M)) sum_k exp(2 pi i j k / M) |k>, M = 2^num_qubits.
Eigen::MatrixXcd fourier(int num_qubits);

}  // namespace gates

}  // namespace qmldesk
