#include "qmldesk/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "qmldesk/errors.hpp"

namespace qmldesk {

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, x);
  return std::strtod(buffer, nullptr);
}

nlohmann::json round_json_numbers(const nlohmann::json& j, int digits) {
  if (j.is_number_float()) return round_significant(j.get<double>(), digits);
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : j.items()) out[key] = round_json_numbers(value, digits);
    return out;
  }
  if (j.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& value : j) out.push_back(round_json_numbers(value, digits));
    return out;
  }
  return j;
}

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["config"] = round_json_numbers(report.config);
  j["results"] = round_json_numbers(report.results);
  j["ledger"] = {
      {"qubits_peak", report.ledger.qubits_peak()},
      {"gate_count", report.ledger.gate_count()},
      {"oracle_queries", report.ledger.oracle_queries()},
      {"shots", report.ledger.shots()},
      {"state_preparations", report.ledger.state_preparations()},
      {"symbolic_costs", report.ledger.symbolic_costs()},
  };
  j["wall_time_seconds"] = round_significant(report.wall_time_seconds);
  j["version"] = report.version;
  return j;
}

nlohmann::json determinism_view(nlohmann::json report_json) {
  report_json.erase("wall_time_seconds");
  return report_json;
}

namespace {

bool fail(std::string* error, const std::string& message) {
  if (error != nullptr) *error = message;
  return false;
}

}  // namespace

bool validate_report(const nlohmann::json& j, std::string* error) {
  if (!j.is_object()) return fail(error, "report must be an object");
  for (const char* key : {"config", "results", "ledger", "wall_time_seconds", "version"})
    if (!j.contains(key)) return fail(error, std::string("missing key: ") + key);
  if (!j["config"].is_object()) return fail(error, "config must be an object");
  if (!j["results"].is_object()) return fail(error, "results must be an object");
  if (!j["wall_time_seconds"].is_number()) return fail(error, "wall_time_seconds must be a number");
  if (!j["version"].is_string()) return fail(error, "version must be a string");

  const nlohmann::json& ledger = j["ledger"];
  if (!ledger.is_object()) return fail(error, "ledger must be an object");
  for (const char* key :
       {"qubits_peak", "gate_count", "oracle_queries", "shots", "state_preparations"}) {
    if (!ledger.contains(key)) return fail(error, std::string("ledger missing: ") + key);
    if (!ledger[key].is_number_integer())
      return fail(error, std::string("ledger counter must be an integer: ") + key);
    if (ledger[key].get<std::int64_t>() < 0)
      return fail(error, std::string("ledger counter must be non-negative: ") + key);
  }
  if (!ledger.contains("symbolic_costs") || !ledger["symbolic_costs"].is_array())
    return fail(error, "ledger.symbolic_costs must be an array");
  for (const auto& note : ledger["symbolic_costs"])
    if (!note.is_string()) return fail(error, "symbolic_costs entries must be strings");
  return true;
}

void write_tsv(std::ostream& out, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  out << "#";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i == 0 ? " " : "\t") << columns[i];
  out << "\n";
  char buffer[64];
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw Error("tsv: row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buffer, sizeof buffer, "%.12g", row[i]);
      out << (i == 0 ? "" : "\t") << buffer;
    }
    out << "\n";
  }
}

void write_tsv_file(const std::string& path, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_tsv(out, columns, rows);
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("power-law fit: size mismatch");
  if (x.size() < 4)
    throw InsufficientRuns("power-law fit: need at least 4 runs, have " +
                           std::to_string(x.size()));
  const auto n = static_cast<double>(x.size());
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw Error("power-law fit: data must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw Error("power-law fit: the varied parameter does not vary");

  ScalingFit fit;
  fit.points = static_cast<int>(x.size());
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / n;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ssr += r * r;
  }
  const double sigma2 = ssr / (n - 2.0);
  fit.stderr_exponent = std::sqrt(sigma2 * n / denom);
  fit.ci_low = fit.exponent - 2.0 * fit.stderr_exponent;
  fit.ci_high = fit.exponent + 2.0 * fit.stderr_exponent;
  return fit;
}

nlohmann::json ledger_report(const std::vector<RunReport>& runs, const std::string& param_field,
                             const std::string& counter) {
  if (runs.size() < 4)
    throw InsufficientRuns("ledger report: need at least 4 runs, have " +
                           std::to_string(runs.size()));
  std::vector<double> x, y;
  for (const RunReport& run : runs) {
    if (!run.config.contains(param_field))
      throw Error("ledger report: config lacks field '" + param_field + "'");
    x.push_back(run.config[param_field].get<double>());
    const ResourceLedger& ledger = run.ledger;
    double value;
    if (counter == "qubits_peak")
      value = static_cast<double>(ledger.qubits_peak());
    else if (counter == "gate_count")
      value = static_cast<double>(ledger.gate_count());
    else if (counter == "oracle_queries")
      value = static_cast<double>(ledger.oracle_queries());
    else if (counter == "shots")
      value = static_cast<double>(ledger.shots());
    else if (counter == "state_preparations")
      value = static_cast<double>(ledger.state_preparations());
    else
      throw Error("ledger report: unknown counter '" + counter + "'");
    y.push_back(value);
  }
  const ScalingFit fit = fit_power_law(x, y);
  return nlohmann::json{{"parameter", param_field},
                        {"counter", counter},
                        {"exponent", round_significant(fit.exponent)},
                        {"stderr", round_significant(fit.stderr_exponent)},
                        {"ci_low", round_significant(fit.ci_low)},
                        {"ci_high", round_significant(fit.ci_high)},
                        {"points", fit.points}};
}

}  // namespace qmldesk
