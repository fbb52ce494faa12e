#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qmldesk/dataset.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"
#include "qmldesk/state.hpp"

namespace qmldesk {

// Interference states for query-to-class distance estimation:
//   psi = (1/sqrt(2)) ( |0>|u> + (1/sqrt(n)) sum_j |j>|v_j> )   (index (x) data)
//   phi = (1/sqrt(Z)) ( |u| |0> - (1/sqrt(n)) sum_j |v_j| |j> ) (index register)
// with Z = |u|^2 + (1/n) sum_j |v_j|^2. Projecting psi's index register onto
// phi succeeds with probability p = D^2 / (2 Z), D being the Euclidean
// distance from u to the norm-weighted class mean.
struct ClassStates {
  QuantumState psi;
  QuantumState phi;
  double z = 0.0;
};

ClassStates build_class_states(const Eigen::VectorXd& query,
                               const std::vector<Eigen::VectorXd>& class_vectors,
                               ResourceLedger& ledger);

struct DistanceEstimate {
  double p_hat = 0.0;
  std::int64_t shots = 0;  // zero for the exact variant
  double distance = 0.0;   // sqrt(2 * p_hat * Z) by construction
  double standard_error = 0.0;
};

// Estimates the class distance. With shots = 0 the exact projection
// probability is returned; otherwise the projection outcome is sampled and
// the standard error of the distance is propagated from the binomial error:
//   SE = sqrt(2 Z) * sqrt(p (1-p) / shots) / (2 sqrt(p))   for p > 0,
//   SE = sqrt(2 Z) / (2 sqrt(shots))                        at p = 0.
DistanceEstimate estimate_distance(const Eigen::VectorXd& query,
                                   const std::vector<Eigen::VectorXd>& class_vectors,
                                   std::int64_t shots, RandomSource& rng,
                                   ResourceLedger& ledger);

// Per-class reference vectors for nearest-centroid classification.
class CentroidModel {
 public:
  static CentroidModel from_dataset(const LabeledDataset& dataset);

  void add_class(int class_id, std::vector<Eigen::VectorXd> vectors);

  const std::vector<int>& class_ids() const { return class_ids_; }
  const std::vector<Eigen::VectorXd>& class_vectors(int class_id) const;
  std::size_t num_classes() const { return class_ids_.size(); }

 private:
  std::vector<int> class_ids_;  // sorted
  std::vector<std::vector<Eigen::VectorXd>> vectors_;
};

struct ClassDistances {
  int label = 0;
  std::vector<int> class_ids;
  std::vector<DistanceEstimate> estimates;  // aligned with class_ids
};

// One distance estimate per class (independent split rng streams in sampled
// mode); smallest distance wins and ties break to the lowest class id.
ClassDistances nearest_centroid_details(const Eigen::VectorXd& query, const CentroidModel& model,
                                        std::int64_t shots, RandomSource& rng,
                                        ResourceLedger& ledger);

int nearest_centroid_classify(const Eigen::VectorXd& query, const CentroidModel& model,
                              std::int64_t shots, RandomSource& rng, ResourceLedger& ledger);

struct BinaryClassification {
  int label = 0;  // 0 = first reference, 1 = second
  DistanceEstimate distance_a;
  DistanceEstimate distance_b;
  double pooled_standard_error = 0.0;
  std::int64_t rounds = 1;  // batches consumed by the adaptive loop
};

// Two-reference classification. Inputs shorter than 8 entries are zero-padded
// to 8 dimensions. Ties go to the first reference.
BinaryClassification binary_classify(const Eigen::VectorXd& query, const Eigen::VectorXd& ref_a,
                                     const Eigen::VectorXd& ref_b, std::int64_t shots,
                                     RandomSource& rng, ResourceLedger& ledger);

// Adaptive variant: keeps adding batches of `batch_shots` per reference until
// |D_A - D_B| > z * pooled SE or `max_rounds` batches have been spent.
BinaryClassification binary_classify_adaptive(const Eigen::VectorXd& query,
                                              const Eigen::VectorXd& ref_a,
                                              const Eigen::VectorXd& ref_b,
                                              std::int64_t batch_shots, double z, int max_rounds,
                                              RandomSource& rng, ResourceLedger& ledger);

}  // namespace qmldesk
