#include "qmldesk/gates.hpp"

#include <cmath>
#include <string>

#include "qmldesk/errors.hpp"

namespace qmldesk {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Eigen::Index n) {
  int bits = 0;
  while ((static_cast<Eigen::Index>(1) << bits) < n) ++bits;
  return bits;
}

}  // namespace

GateOp::GateOp(Eigen::MatrixXcd matrix, std::vector<int> targets)
    : matrix_(std::move(matrix)), targets_(std::move(targets)) {
  if (matrix_.rows() != matrix_.cols())
    throw DimensionMismatch("gate: matrix is not square");
  if (!is_power_of_two(matrix_.rows()))
    throw DimensionMismatch("gate: matrix dimension is not a power of two");
  if (targets_.empty()) throw TargetOutOfRange("gate: no target qubits");
  const int arity = log2_exact(matrix_.rows());
  if (arity != static_cast<int>(targets_.size()))
    throw DimensionMismatch("gate: matrix acts on " + std::to_string(arity) +
                            " qubits but " + std::to_string(targets_.size()) +
                            " targets were listed");
  for (std::size_t i = 0; i < targets_.size(); ++i)
    for (std::size_t j = i + 1; j < targets_.size(); ++j)
      if (targets_[i] == targets_[j])
        throw TargetOutOfRange("gate: duplicate target qubit " + std::to_string(targets_[i]));
  const Eigen::MatrixXcd delta =
      matrix_.adjoint() * matrix_ - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
  const double err = delta.cwiseAbs().maxCoeff();
  if (err > kUnitaryTolerance)
    throw NonUnitaryGate("gate: unitarity violated by " + std::to_string(err));
}

QuantumState apply_unitary(const QuantumState& state, const GateOp& gate,
                           ResourceLedger& ledger) {
  const int n = state.num_qubits();
  const int k = gate.arity();
  std::uint64_t mask = 0;
  std::vector<int> bit_pos(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const int t = gate.targets()[static_cast<std::size_t>(j)];
    if (t < 0 || t >= n)
      throw TargetOutOfRange("gate: target qubit " + std::to_string(t) +
                             " out of range for " + std::to_string(n) + " qubits");
    bit_pos[static_cast<std::size_t>(j)] = n - 1 - t;
    mask |= 1ULL << (n - 1 - t);
  }

  const std::uint64_t local_dim = 1ULL << k;
  Eigen::VectorXcd out = state.amplitudes();
  Eigen::VectorXcd local(static_cast<Eigen::Index>(local_dim));
  std::vector<std::uint64_t> offsets(local_dim);
  for (std::uint64_t b = 0; b < local_dim; ++b) {
    std::uint64_t off = 0;
    for (int j = 0; j < k; ++j)
      if ((b >> (k - 1 - j)) & 1ULL) off |= 1ULL << bit_pos[static_cast<std::size_t>(j)];
    offsets[b] = off;
  }

  for (std::uint64_t base = 0; base < state.dim(); ++base) {
    if (base & mask) continue;
    for (std::uint64_t b = 0; b < local_dim; ++b)
      local(static_cast<Eigen::Index>(b)) = out(static_cast<Eigen::Index>(base | offsets[b]));
    local = gate.matrix() * local;
    for (std::uint64_t b = 0; b < local_dim; ++b)
      out(static_cast<Eigen::Index>(base | offsets[b])) = local(static_cast<Eigen::Index>(b));
  }

  ledger.charge_qubits(n);
  ledger.charge_gates();
  return QuantumState(n, std::move(out));
}

namespace gates {

Eigen::MatrixXcd identity(int num_qubits) {
  const auto dim = static_cast<Eigen::Index>(1) << num_qubits;
  return Eigen::MatrixXcd::Identity(dim, dim);
}

Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Eigen::MatrixXcd pauli_y() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Eigen::MatrixXcd pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd hadamard() {
  Eigen::MatrixXcd m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Eigen::MatrixXcd phase(double theta) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
  m(1, 1) = std::polar(1.0, theta);
  return m;
}

Eigen::MatrixXcd swap_gate() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return m;
}

Eigen::MatrixXcd controlled(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) throw DimensionMismatch("controlled: matrix is not square");
  const Eigen::Index d = u.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2 * d, 2 * d);
  m.bottomRightCorner(d, d) = u;
  return m;
}

Eigen::MatrixXcd cnot() { return controlled(pauli_x()); }

Eigen::MatrixXcd toffoli() { return controlled(cnot()); }

Eigen::MatrixXcd cswap() { return controlled(swap_gate()); }

Eigen::MatrixXcd fourier(int num_qubits) {
  if (num_qubits < 1) throw Error("fourier: need at least one qubit");
  const auto dim = static_cast<Eigen::Index>(1) << num_qubits;
  Eigen::MatrixXcd m(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = 0; k < dim; ++k)
      m(k, j) = scale * std::polar(1.0, 2.0 * M_PI * static_cast<double>(j) *
                                            static_cast<double>(k) / static_cast<double>(dim));
  return m;
}

}  // namespace gates

}  // namespace qmldesk
