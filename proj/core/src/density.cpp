#include "qmldesk/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmldesk/errors.hpp"

namespace qmldesk {

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw DimensionMismatch("density matrix: not square");
  Eigen::Index dim = entries_.rows();
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw DimensionMismatch("density matrix: dimension " + std::to_string(dim) +
                            " is not a power of two");
  num_qubits_ = 0;
  while ((static_cast<Eigen::Index>(1) << num_qubits_) < dim) ++num_qubits_;

  const double herm_err = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > kHermitianTolerance)
    throw InvalidState("density matrix: Hermiticity violated by " + std::to_string(herm_err));
  const double trace_err = std::abs(entries_.trace() - Complex(1.0, 0.0));
  if (trace_err > kTraceTolerance)
    throw InvalidState("density matrix: trace deviates from 1 by " + std::to_string(trace_err));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kPsdTolerance)
    throw InvalidState("density matrix: negative eigenvalue " + std::to_string(min_eig));
}

DensityMatrix DensityMatrix::from_state(const QuantumState& state) {
  const auto& a = state.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  const auto dim = static_cast<Eigen::Index>(1) << num_qubits;
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw EmptyKeepSet("partial trace: keep set is empty");
  const int n = rho.num_qubits();
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] < 0 || kept[i] >= n)
      throw TargetOutOfRange("partial trace: qubit " + std::to_string(kept[i]) + " out of range");
    if (i > 0 && kept[i] == kept[i - 1])
      throw TargetOutOfRange("partial trace: qubit " + std::to_string(kept[i]) + " listed twice");
  }

  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const int k = static_cast<int>(kept.size());
  const int m = static_cast<int>(traced.size());
  const auto out_dim = static_cast<Eigen::Index>(1) << k;

  // Bit position (within the full index) of each kept / traced qubit.
  auto full_index = [&](std::uint64_t kept_bits, std::uint64_t traced_bits) {
    std::uint64_t idx = 0;
    for (int j = 0; j < k; ++j)
      if ((kept_bits >> (k - 1 - j)) & 1ULL) idx |= 1ULL << (n - 1 - kept[static_cast<std::size_t>(j)]);
    for (int j = 0; j < m; ++j)
      if ((traced_bits >> (m - 1 - j)) & 1ULL)
        idx |= 1ULL << (n - 1 - traced[static_cast<std::size_t>(j)]);
    return idx;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
  const std::uint64_t traced_dim = 1ULL << m;
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(out_dim); ++r)
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(out_dim); ++c) {
      Complex acc = 0.0;
      for (std::uint64_t t = 0; t < traced_dim; ++t)
        acc += rho.entries()(static_cast<Eigen::Index>(full_index(r, t)),
                             static_cast<Eigen::Index>(full_index(c, t)));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  return DensityMatrix(std::move(out));
}

DensityMatrix reduced_density(const QuantumState& state, const std::vector<int>& keep) {
  if (keep.empty()) throw EmptyKeepSet("reduced density: keep set is empty");
  const int n = state.num_qubits();
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] < 0 || kept[i] >= n)
      throw TargetOutOfRange("reduced density: qubit " + std::to_string(kept[i]) +
                             " out of range");
    if (i > 0 && kept[i] == kept[i - 1])
      throw TargetOutOfRange("reduced density: qubit " + std::to_string(kept[i]) +
                             " listed twice");
  }

  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const int k = static_cast<int>(kept.size());
  const int m = static_cast<int>(traced.size());
  const auto out_dim = static_cast<Eigen::Index>(1) << k;

  auto full_index = [&](std::uint64_t kept_bits, std::uint64_t traced_bits) {
    std::uint64_t idx = 0;
    for (int j = 0; j < k; ++j)
      if ((kept_bits >> (k - 1 - j)) & 1ULL)
        idx |= 1ULL << (n - 1 - kept[static_cast<std::size_t>(j)]);
    for (int j = 0; j < m; ++j)
      if ((traced_bits >> (m - 1 - j)) & 1ULL)
        idx |= 1ULL << (n - 1 - traced[static_cast<std::size_t>(j)]);
    return idx;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
  const std::uint64_t traced_dim = 1ULL << m;
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(out_dim); ++r)
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(out_dim); ++c) {
      Complex acc = 0.0;
      for (std::uint64_t t = 0; t < traced_dim; ++t)
        acc += state.amplitude(full_index(r, t)) * std::conj(state.amplitude(full_index(c, t)));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  return DensityMatrix(std::move(out));
}

}  // namespace qmldesk
