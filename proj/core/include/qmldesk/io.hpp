#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/boltzmann.hpp"
#include "qmldesk/dataset.hpp"

namespace qmldesk {

// Labelled CSV with header `label,f1,...,fm`. Labels may be arbitrary
// strings; they map to ids by sorted order (numeric order when every label
// parses as an integer). `label_names` inverts the mapping.
struct LabeledCsv {
  LabeledDataset dataset;
  std::vector<std::string> label_names;
};

LabeledCsv load_labeled_csv(const std::string& path);

// Unlabelled CSV with header `f1,...,fm` (a leading label column is accepted
// and skipped); rows become matrix rows.
Eigen::MatrixXd load_matrix_csv(const std::string& path);

// Binary patterns, one row each; entries must be 0 or 1, duplicates merge.
BinaryDataset load_binary_csv(const std::string& path);

void write_labeled_csv(const std::string& path, const LabeledDataset& dataset,
                       const std::vector<std::string>& label_names);

}  // namespace qmldesk
