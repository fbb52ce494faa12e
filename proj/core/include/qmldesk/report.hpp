#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmldesk/ledger.hpp"

namespace qmldesk {

inline constexpr char kVersionStamp[] = "qmldesk 0.1.0";

// One experiment's full record. Serialized with sorted keys and every float
// rounded to 12 significant digits, so identical (config, seed) runs produce
// byte-identical JSON apart from the wall-time field.
struct RunReport {
  nlohmann::json config;
  nlohmann::json results;
  ResourceLedger ledger;
  double wall_time_seconds = 0.0;
  std::string version = kVersionStamp;
};

// Rounds to `digits` significant decimal digits (shortest round-trip via
// printf/strtod).
double round_significant(double x, int digits = 12);

// Recursively rounds every float in a JSON tree.
nlohmann::json round_json_numbers(const nlohmann::json& j, int digits = 12);

nlohmann::json report_to_json(const RunReport& report);

// The report without its wall-time field: the part covered by the
// determinism contract.
nlohmann::json determinism_view(nlohmann::json report_json);

// Structural validation mirroring schemas/run_report.schema.json. Returns
// false and fills `error` on the first violation.
bool validate_report(const nlohmann::json& j, std::string* error);

// Tab-separated plot data with a '#'-prefixed header row.
void write_tsv(std::ostream& out, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);
void write_tsv_file(const std::string& path, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows);

// Log-log ordinary-least-squares fit y ~ x^exponent. Requires >= 4 points
// and positive data; the confidence interval is exponent +- 2 standard
// errors.
struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;  // log-space
  double stderr_exponent = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int points = 0;
};

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Reads `param_field` from each run's config and `counter` from its ledger
// ("qubits_peak", "gate_count", "oracle_queries", "shots",
// "state_preparations") and fits the scaling exponent across runs.
nlohmann::json ledger_report(const std::vector<RunReport>& runs, const std::string& param_field,
                             const std::string& counter);

}  // namespace qmldesk
