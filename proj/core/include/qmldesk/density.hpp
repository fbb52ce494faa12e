#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qmldesk/state.hpp"

namespace qmldesk {

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-9;

// Dense density operator. Validated on construction: power-of-two dimension,
// Hermitian, unit trace, and positive semidefinite up to numerical slack.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix from_state(const QuantumState& state);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXcd& entries() const { return entries_; }

  double purity() const;

 private:
  int num_qubits_;
  Eigen::MatrixXcd entries_;
};

// Traces out every qubit not in `keep`. The kept qubits appear in the result
// in ascending original order. Throws EmptyKeepSet when `keep` is empty.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// Reduced density operator of a pure state on the kept qubits, computed
// without materializing the full outer product.
DensityMatrix reduced_density(const QuantumState& state, const std::vector<int>& keep);

}  // namespace qmldesk
