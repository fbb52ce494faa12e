#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace qmldesk {

// In-memory labelled dataset of real feature vectors. All rows share one
// dimension; labels are free-form non-negative integers.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  void add(Eigen::VectorXd features, int label);

  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  Eigen::Index dimension() const;

  const Eigen::VectorXd& features(std::size_t i) const { return features_.at(i); }
  int label(std::size_t i) const { return labels_.at(i); }

  // Sorted unique class ids.
  std::vector<int> class_ids() const;
  std::vector<std::size_t> indices_of_class(int label) const;

  // Mean feature vector of one class; throws EmptyTrainingSet when the class
  // has no members.
  Eigen::VectorXd centroid(int label) const;

 private:
  std::vector<Eigen::VectorXd> features_;
  std::vector<int> labels_;
};

}  // namespace qmldesk
