#include "qmldesk/dataset.hpp"

#include <algorithm>
#include <string>

#include "qmldesk/errors.hpp"

namespace qmldesk {

void LabeledDataset::add(Eigen::VectorXd features, int label) {
  if (features.size() == 0) throw ZeroVector("dataset: empty feature vector");
  if (!features_.empty() && features.size() != features_.front().size())
    throw DimensionMismatch("dataset: row has dimension " + std::to_string(features.size()) +
                            ", expected " + std::to_string(features_.front().size()));
  features_.push_back(std::move(features));
  labels_.push_back(label);
}

Eigen::Index LabeledDataset::dimension() const {
  if (features_.empty()) throw EmptyTrainingSet("dataset: no rows");
  return features_.front().size();
}

std::vector<int> LabeledDataset::class_ids() const {
  std::vector<int> ids = labels_;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<std::size_t> LabeledDataset::indices_of_class(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) out.push_back(i);
  return out;
}

Eigen::VectorXd LabeledDataset::centroid(int label) const {
  const auto idx = indices_of_class(label);
  if (idx.empty())
    throw EmptyTrainingSet("dataset: class " + std::to_string(label) + " has no members");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dimension());
  for (std::size_t i : idx) sum += features_[i];
  return sum / static_cast<double>(idx.size());
}

}  // namespace qmldesk
