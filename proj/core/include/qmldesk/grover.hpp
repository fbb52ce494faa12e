#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qmldesk/dataset.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"

namespace qmldesk {

// Classical value table standing in for a quantum oracle. Counted reads model
// oracle evaluations (one count per evaluation, including a superposed
// application inside a Grover iteration); `raw` skips the counter and exists
// for the simulator's own bookkeeping and for test-mode verification.
class OracleTable {
 public:
  explicit OracleTable(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double value(std::size_t i);                      // counted oracle read
  const std::vector<double>& raw() const { return values_; }
  void set_value(std::size_t i, double v);          // uncounted (exclusion etc.)

  std::int64_t query_counter() const { return query_counter_; }
  void count_queries(std::int64_t n);

 private:
  std::vector<double> values_;
  std::int64_t query_counter_ = 0;
};

// Pads a value list with +infinity up to the next power of two.
std::vector<double> pad_with_infinity(std::vector<double> values);

// sin^2((2j+1) theta) with theta = arcsin(sqrt(marked / total)): probability
// that j Grover iterations end on a marked item.
double grover_success_probability(std::uint64_t total, std::uint64_t marked,
                                  std::int64_t iterations);

struct GroverResult {
  std::uint64_t index = 0;
  bool marked = false;
  std::int64_t iterations = 0;
  double success_probability = 0.0;  // total mass on marked items before sampling
};

// Runs the Grover iteration on log2(total) qubits (total must be a power of
// two) and samples one index from the final state. Iterations default to
// floor(pi/4 sqrt(total/marked)); that automatic mode counts the marked items
// and throws NoMarkedItems when there are none. Explicit iteration counts
// allow an empty marked set (the state stays uniform).
GroverResult grover_search(const std::function<bool(std::uint64_t)>& marked_predicate,
                           std::uint64_t total, std::optional<std::int64_t> iterations,
                           RandomSource& rng, ResourceLedger& ledger);

struct DurrHoyerOptions {
  double budget_constant = 22.5;  // query cap = budget_constant * sqrt(N)
  bool verify = false;            // test mode: certify the result by an uncounted scan
};

struct DurrHoyerResult {
  std::size_t index = 0;
  double value = 0.0;
  std::int64_t queries = 0;        // oracle evaluations consumed by this call
  bool budget_exhausted = false;   // stopped at the cap; result is best-so-far
  bool degenerate = false;         // several indices attain the minimum
  bool verified = false;           // set by test mode after the certifying scan
};

// Threshold-descent minimum finding: repeatedly Grover-search for an index
// whose value beats the current best, with the unknown-marked-count iteration
// schedule (j uniform below m, m growing by 6/5 up to sqrt(N)). Stops early
// once no strictly smaller entry exists, otherwise at the query budget.
DurrHoyerResult durr_hoyer_minimum(OracleTable& table, RandomSource& rng, ResourceLedger& ledger,
                                   const DurrHoyerOptions& options = {});

enum class DistanceBackend { exact, sampled };

struct KNNConfig {
  int k = 1;                       // odd, at most the training-set size
  std::int64_t shots = 0;          // per distance estimate (sampled backend)
  DistanceBackend backend = DistanceBackend::exact;
};

struct KNNResult {
  int label = 0;
  std::vector<std::size_t> neighbor_indices;  // in discovery order
  std::vector<int> neighbor_labels;
  bool budget_exhausted = false;  // a neighbor search hit its retry cap
};

// k-nearest-neighbour vote: loads query-to-point distances into an oracle
// table, extracts k minima by successive minimum finding with +infinity
// exclusion, and takes the unweighted majority label (ties to the lowest
// class id).
KNNResult knn_details(const Eigen::VectorXd& query, const LabeledDataset& dataset,
                      const KNNConfig& config, RandomSource& rng, ResourceLedger& ledger);
int knn_classify(const Eigen::VectorXd& query, const LabeledDataset& dataset,
                 const KNNConfig& config, RandomSource& rng, ResourceLedger& ledger);

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

struct MstClusterResult {
  std::vector<int> assignments;          // cluster id per point, ids by smallest member
  std::vector<WeightedEdge> tree_edges;  // the spanning tree, selection order
  std::vector<WeightedEdge> removed_edges;
};

// Single-linkage clustering: grows a spanning tree Prim-style, where every
// next-edge selection runs minimum finding over the cheapest-link-to-tree
// table of the outside points, then cuts the k-1 heaviest tree edges. Each
// table evaluation is charged as one oracle query; the cheapest-link values
// themselves stand in for a composite oracle the simulator evaluates from the
// stored geometry.
MstClusterResult mst_cluster(const LabeledDataset& points, int k_clusters, RandomSource& rng,
                             ResourceLedger& ledger);

// Classical Prim baseline charging one oracle query per connection-matrix
// read (initial row plus every key update), for cost comparisons.
MstClusterResult mst_cluster_classical(const LabeledDataset& points, int k_clusters,
                                       ResourceLedger& ledger);

}  // namespace qmldesk
