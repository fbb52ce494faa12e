#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qmldesk {

// Per-run accounting of simulated quantum resources. Counters only grow;
// a fresh ledger is used for each run.
class ResourceLedger {
 public:
  std::int64_t qubits_peak() const { return qubits_peak_; }
  std::int64_t gate_count() const { return gate_count_; }
  std::int64_t oracle_queries() const { return oracle_queries_; }
  std::int64_t shots() const { return shots_; }
  std::int64_t state_preparations() const { return state_preparations_; }
  const std::vector<std::string>& symbolic_costs() const { return symbolic_costs_; }

  // Records that a circuit of `n` qubits was live; keeps the maximum.
  void charge_qubits(std::int64_t n);
  void charge_gates(std::int64_t n = 1);
  void charge_oracle_queries(std::int64_t n = 1);
  void charge_shots(std::int64_t n);
  void charge_state_preparations(std::int64_t n = 1);

  // Appends an asymptotic cost annotation that is tracked but not executed
  // (e.g. the cost of loading a classical vector through amplitude-addressed
  // memory). Kept as free text in reports.
  void note_symbolic_cost(const std::string& note);

  // Accumulates another ledger into this one (sums counters, max of peaks).
  void merge(const ResourceLedger& other);

 private:
  std::int64_t qubits_peak_ = 0;
  std::int64_t gate_count_ = 0;
  std::int64_t oracle_queries_ = 0;
  std::int64_t shots_ = 0;
  std::int64_t state_preparations_ = 0;
  std::vector<std::string> symbolic_costs_;
};

}  // namespace qmldesk
