#include "qmldesk/io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "qmldesk/errors.hpp"

namespace qmldesk {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& field, int line_number) {
  const std::string text = strip(field);
  if (text.empty())
    throw ParseError("line " + std::to_string(line_number) + ": empty numeric field");
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw ParseError("line " + std::to_string(line_number) + ": not a number: '" + text + "'");
  return value;
}

bool parses_as_integer(const std::string& text, long long* out) {
  char* end = nullptr;
  const long long value = std::strtoll(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty()) return false;
  *out = value;
  return true;
}

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // paired with 1-based line numbers
  std::vector<int> line_numbers;
  bool labeled = false;
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  CsvFile file;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    std::vector<std::string> fields = split_fields(trimmed);
    if (file.header.empty()) {
      for (std::string& f : fields) f = strip(f);
      file.header = std::move(fields);
      if (file.header.empty())
        throw ParseError("line 1: empty header row");
      file.labeled = file.header.front() == "label";
      continue;
    }
    if (fields.size() != file.header.size())
      throw ParseError("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(file.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    file.rows.push_back(std::move(fields));
    file.line_numbers.push_back(line_number);
  }
  if (file.header.empty()) throw ParseError("'" + path + "': no header row");
  return file;
}

}  // namespace

LabeledCsv load_labeled_csv(const std::string& path) {
  const CsvFile file = read_csv(path);
  if (!file.labeled)
    throw ParseError("'" + path + "': expected a 'label' first column in the header");
  if (file.header.size() < 2)
    throw ParseError("'" + path + "': no feature columns");
  if (file.rows.empty()) throw EmptyTrainingSet("'" + path + "': no data rows");

  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> features;
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const auto& row = file.rows[r];
    labels.push_back(strip(row.front()));
    Eigen::VectorXd v(static_cast<Eigen::Index>(row.size() - 1));
    for (std::size_t c = 1; c < row.size(); ++c)
      v(static_cast<Eigen::Index>(c - 1)) = parse_number(row[c], file.line_numbers[r]);
    if (v.norm() == 0.0)
      throw ZeroVector("row " + std::to_string(r + 1) + ": zero feature vector");
    features.push_back(std::move(v));
  }

  // Map label strings to ids: numeric order when every label is an integer,
  // otherwise lexicographic.
  std::vector<std::string> unique_labels = labels;
  std::sort(unique_labels.begin(), unique_labels.end());
  unique_labels.erase(std::unique(unique_labels.begin(), unique_labels.end()),
                      unique_labels.end());
  bool all_integers = true;
  std::vector<long long> numeric(unique_labels.size());
  for (std::size_t i = 0; i < unique_labels.size(); ++i)
    if (!parses_as_integer(unique_labels[i], &numeric[i])) {
      all_integers = false;
      break;
    }
  if (all_integers) {
    std::vector<std::size_t> order(unique_labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return numeric[a] < numeric[b]; });
    std::vector<std::string> reordered;
    for (std::size_t i : order) reordered.push_back(unique_labels[i]);
    unique_labels = std::move(reordered);
  }
  std::map<std::string, int> id_of;
  for (std::size_t i = 0; i < unique_labels.size(); ++i)
    id_of[unique_labels[i]] = static_cast<int>(i);

  LabeledCsv out;
  out.label_names = std::move(unique_labels);
  for (std::size_t r = 0; r < features.size(); ++r)
    out.dataset.add(std::move(features[r]), id_of[labels[r]]);
  return out;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  const CsvFile file = read_csv(path);
  const std::size_t skip = file.labeled ? 1 : 0;
  const std::size_t cols = file.header.size() - skip;
  if (cols < 1) throw ParseError("'" + path + "': no feature columns");
  if (file.rows.empty()) throw EmptyTrainingSet("'" + path + "': no data rows");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(file.rows.size()),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < file.rows.size(); ++r)
    for (std::size_t c = skip; c < file.header.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - skip)) =
          parse_number(file.rows[r][c], file.line_numbers[r]);
  return m;
}

BinaryDataset load_binary_csv(const std::string& path) {
  const Eigen::MatrixXd rows = load_matrix_csv(path);
  BinaryDataset data;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    try {
      data.add(rows.row(r).transpose());
    } catch (const InvalidState&) {
      throw ParseError("row " + std::to_string(r + 1) + ": entries must be 0 or 1");
    }
  }
  return data;
}

void write_labeled_csv(const std::string& path, const LabeledDataset& dataset,
                       const std::vector<std::string>& label_names) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "label";
  for (Eigen::Index c = 0; c < dataset.dimension(); ++c) out << ",f" << (c + 1);
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int id = dataset.label(i);
    if (id < 0 || static_cast<std::size_t>(id) >= label_names.size())
      throw Error("label id " + std::to_string(id) + " has no name");
    out << label_names[static_cast<std::size_t>(id)];
    const Eigen::VectorXd& v = dataset.features(i);
    for (Eigen::Index c = 0; c < v.size(); ++c) out << "," << v(c);
    out << "\n";
  }
}

}  // namespace qmldesk
