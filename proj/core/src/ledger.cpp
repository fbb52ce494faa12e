#include "qmldesk/ledger.hpp"

#include <algorithm>

#include "qmldesk/errors.hpp"

namespace qmldesk {

void ResourceLedger::charge_qubits(std::int64_t n) {
  if (n < 0) throw Error("ledger: negative qubit count");
  qubits_peak_ = std::max(qubits_peak_, n);
}

void ResourceLedger::charge_gates(std::int64_t n) {
  if (n < 0) throw Error("ledger: negative gate count");
  gate_count_ += n;
}

void ResourceLedger::charge_oracle_queries(std::int64_t n) {
  if (n < 0) throw Error("ledger: negative oracle query count");
  oracle_queries_ += n;
}

void ResourceLedger::charge_shots(std::int64_t n) {
  if (n < 0) throw Error("ledger: negative shot count");
  shots_ += n;
}

void ResourceLedger::charge_state_preparations(std::int64_t n) {
  if (n < 0) throw Error("ledger: negative state-preparation count");
  state_preparations_ += n;
}

void ResourceLedger::note_symbolic_cost(const std::string& note) {
  symbolic_costs_.push_back(note);
}

void ResourceLedger::merge(const ResourceLedger& other) {
  qubits_peak_ = std::max(qubits_peak_, other.qubits_peak_);
  gate_count_ += other.gate_count_;
  oracle_queries_ += other.oracle_queries_;
  shots_ += other.shots_;
  state_preparations_ += other.state_preparations_;
  symbolic_costs_.insert(symbolic_costs_.end(), other.symbolic_costs_.begin(),
                         other.symbolic_costs_.end());
}

}  // namespace qmldesk
