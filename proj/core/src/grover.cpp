#include "qmldesk/grover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "qmldesk/distance.hpp"
#include "qmldesk/errors.hpp"

namespace qmldesk {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::uint64_t n) {
  int bits = 0;
  while ((static_cast<std::uint64_t>(1) << bits) < n) ++bits;
  return bits;
}

}  // namespace

std::vector<double> pad_with_infinity(std::vector<double> values) {
  if (values.empty()) throw Error("oracle table: need at least one value");
  std::size_t padded = 1;
  while (padded < values.size()) padded <<= 1;
  values.resize(padded, kInfinity);
  return values;
}

OracleTable::OracleTable(std::vector<double> values)
    : values_(pad_with_infinity(std::move(values))) {}

double OracleTable::value(std::size_t i) {
  if (i >= values_.size()) throw TargetOutOfRange("oracle table: index out of range");
  ++query_counter_;
  return values_[i];
}

void OracleTable::set_value(std::size_t i, double v) {
  if (i >= values_.size()) throw TargetOutOfRange("oracle table: index out of range");
  values_[i] = v;
}

void OracleTable::count_queries(std::int64_t n) {
  if (n < 0) throw Error("oracle table: negative query count");
  query_counter_ += n;
}

double grover_success_probability(std::uint64_t total, std::uint64_t marked,
                                  std::int64_t iterations) {
  if (total == 0) throw Error("grover: empty search space");
  if (marked > total) throw Error("grover: more marked items than items");
  if (iterations < 0) throw Error("grover: negative iteration count");
  const double theta =
      std::asin(std::sqrt(static_cast<double>(marked) / static_cast<double>(total)));
  const double s = std::sin(static_cast<double>(2 * iterations + 1) * theta);
  return s * s;
}

GroverResult grover_search(const std::function<bool(std::uint64_t)>& marked_predicate,
                           std::uint64_t total, std::optional<std::int64_t> iterations,
                           RandomSource& rng, ResourceLedger& ledger) {
  if (!is_power_of_two(total)) throw Error("grover: search space must be a power of two");

  std::vector<char> mask(total, 0);
  std::uint64_t marked_count = 0;
  for (std::uint64_t i = 0; i < total; ++i)
    if (marked_predicate(i)) {
      mask[i] = 1;
      ++marked_count;
    }

  std::int64_t j;
  if (iterations.has_value()) {
    if (*iterations < 0) throw Error("grover: negative iteration count");
    j = *iterations;
  } else {
    if (marked_count == 0)
      throw NoMarkedItems("grover: no marked items, cannot choose an iteration count");
    j = static_cast<std::int64_t>(std::floor(
        (M_PI / 4.0) * std::sqrt(static_cast<double>(total) / static_cast<double>(marked_count))));
  }

  // Amplitudes stay real: uniform start, sign-flip oracle, inversion about
  // the mean.
  std::vector<double> amp(total, 1.0 / std::sqrt(static_cast<double>(total)));
  for (std::int64_t it = 0; it < j; ++it) {
    for (std::uint64_t i = 0; i < total; ++i)
      if (mask[i]) amp[i] = -amp[i];
    const double mean =
        std::accumulate(amp.begin(), amp.end(), 0.0) / static_cast<double>(total);
    for (double& a : amp) a = 2.0 * mean - a;
  }

  std::vector<double> probs(total);
  double marked_mass = 0.0;
  for (std::uint64_t i = 0; i < total; ++i) {
    probs[i] = amp[i] * amp[i];
    if (mask[i]) marked_mass += probs[i];
  }

  const int qubits = log2_exact(total);
  ledger.charge_qubits(qubits);
  ledger.charge_gates(qubits + 2 * j);  // initial layer, then oracle + diffusion per round
  ledger.charge_oracle_queries(j);
  ledger.charge_state_preparations(1);
  ledger.charge_shots(1);

  GroverResult result;
  result.index = rng.discrete(probs);
  result.marked = mask[result.index] != 0;
  result.iterations = j;
  result.success_probability = marked_mass;
  return result;
}

DurrHoyerResult durr_hoyer_minimum(OracleTable& table, RandomSource& rng, ResourceLedger& ledger,
                                   const DurrHoyerOptions& options) {
  const std::size_t n = table.size();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const auto budget =
      static_cast<std::int64_t>(std::ceil(options.budget_constant * sqrt_n));
  const std::int64_t start = table.query_counter();

  // The algorithm is the fixed-runtime variant: threshold descent for
  // `budget` oracle evaluations, then interrupt. Once no strictly smaller
  // entry exists the outcome is frozen, so the simulator stops iterating and
  // charges the untouched remainder of the budget in one step — the real run
  // would spend it on rounds that cannot change the result.
  DurrHoyerResult result;
  result.index = rng.uniform_int(n);
  result.value = table.value(result.index);
  ledger.charge_oracle_queries(1);

  auto used = [&]() { return table.query_counter() - start; };
  auto smaller_count = [&]() {
    std::size_t count = 0;
    for (double v : table.raw())
      if (v < result.value) ++count;
    return count;
  };

  double m = 1.0;
  bool frozen = false;
  while (true) {
    if (smaller_count() == 0) {
      frozen = true;
      break;
    }
    const std::int64_t remaining = budget - used();
    if (remaining <= 0) {
      result.budget_exhausted = true;
      break;
    }
    const auto j = std::min<std::int64_t>(
        static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(std::ceil(m)))),
        remaining - 1);  // interrupt mid-round at the bound
    const double threshold = result.value;
    GroverResult grover = grover_search(
        [&](std::uint64_t i) { return table.raw()[i] < threshold; },
        static_cast<std::uint64_t>(n), j, rng, ledger);
    table.count_queries(j);
    const double sampled_value = table.value(grover.index);
    ledger.charge_oracle_queries(1);
    if (sampled_value < result.value) {
      result.index = grover.index;
      result.value = sampled_value;
      m = 1.0;
    } else {
      m = std::min(m * 1.2, sqrt_n);
    }
  }

  if (frozen && used() < budget) {
    const std::int64_t remainder = budget - used();
    table.count_queries(remainder);
    ledger.charge_oracle_queries(remainder);
  }
  result.queries = used();

  const double minimum = *std::min_element(table.raw().begin(), table.raw().end());
  result.degenerate =
      std::count(table.raw().begin(), table.raw().end(), minimum) > 1;
  if (options.verify) {
    result.verified = !result.budget_exhausted && result.value <= minimum;
  } else {
    ledger.note_symbolic_cost(
        "min-finding guarantee: success probability >= 1/2 within " +
        std::to_string(options.budget_constant) + " sqrt(N) oracle queries");
  }
  return result;
}

namespace {

// Runs minimum finding in certifying mode, retrying on budget exhaustion.
DurrHoyerResult verified_minimum(OracleTable& table, RandomSource& rng, ResourceLedger& ledger,
                                 bool& exhausted_flag) {
  DurrHoyerOptions options;
  options.verify = true;
  DurrHoyerResult result;
  for (int attempt = 0; attempt < 64; ++attempt) {
    result = durr_hoyer_minimum(table, rng, ledger, options);
    if (result.verified) return result;
  }
  // Out of retries: fall back to the true argmin so callers never see a
  // padding slot, and report the exhaustion.
  exhausted_flag = true;
  const auto& raw = table.raw();
  result.index = static_cast<std::size_t>(
      std::min_element(raw.begin(), raw.end()) - raw.begin());
  result.value = raw[result.index];
  return result;
}

}  // namespace

KNNResult knn_details(const Eigen::VectorXd& query, const LabeledDataset& dataset,
                      const KNNConfig& config, RandomSource& rng, ResourceLedger& ledger) {
  if (dataset.empty()) throw EmptyTrainingSet("k-NN: empty training set");
  if (config.k < 1 || config.k % 2 == 0)
    throw Error("k-NN: k must be a positive odd number");
  if (static_cast<std::size_t>(config.k) > dataset.size())
    throw Error("k-NN: k exceeds the training-set size");
  if (config.backend == DistanceBackend::sampled && config.shots < 1)
    throw InvalidState("k-NN: sampled backend needs a positive shot count");

  const std::int64_t shots = config.backend == DistanceBackend::exact ? 0 : config.shots;
  std::vector<double> distances(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    RandomSource stream = rng.split(i);
    distances[i] =
        estimate_distance(query, {dataset.features(i)}, shots, stream, ledger).distance;
  }
  ledger.note_symbolic_cost(
      "k-NN distance loading: amplitude-estimated distances realized as a classical "
      "oracle table; shot costs accounted separately");

  OracleTable table(std::move(distances));
  KNNResult result;
  for (int round = 0; round < config.k; ++round) {
    DurrHoyerResult dh = verified_minimum(table, rng, ledger, result.budget_exhausted);
    result.neighbor_indices.push_back(dh.index);
    result.neighbor_labels.push_back(dataset.label(dh.index));
    table.set_value(dh.index, kInfinity);
  }

  std::map<int, int> votes;
  for (int label : result.neighbor_labels) ++votes[label];
  int best_label = result.neighbor_labels.front();
  int best_count = 0;
  for (const auto& [label, count] : votes)
    if (count > best_count) {  // map order makes ties resolve to the lowest id
      best_label = label;
      best_count = count;
    }
  result.label = best_label;
  return result;
}

int knn_classify(const Eigen::VectorXd& query, const LabeledDataset& dataset,
                 const KNNConfig& config, RandomSource& rng, ResourceLedger& ledger) {
  return knn_details(query, dataset, config, rng, ledger).label;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;

  explicit DisjointSets(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

double point_distance(const LabeledDataset& points, std::size_t a, std::size_t b) {
  return (points.features(a) - points.features(b)).norm();
}

// Shared tail: cut the k-1 heaviest tree edges and number the resulting
// components by their smallest member.
MstClusterResult cut_clusters(std::size_t n, std::vector<WeightedEdge> tree, int k_clusters) {
  MstClusterResult result;
  result.tree_edges = tree;

  std::stable_sort(tree.begin(), tree.end(),
                   [](const WeightedEdge& a, const WeightedEdge& b) { return a.weight > b.weight; });
  DisjointSets sets(n);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (i < static_cast<std::size_t>(k_clusters - 1))
      result.removed_edges.push_back(tree[i]);
    else
      sets.unite(tree[i].u, tree[i].v);
  }

  std::map<std::size_t, int> cluster_of_root;
  result.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    auto [it, inserted] = cluster_of_root.emplace(root, static_cast<int>(cluster_of_root.size()));
    result.assignments[i] = it->second;  // first appearance orders the ids
  }
  return result;
}

void validate_cluster_request(const LabeledDataset& points, int k_clusters) {
  if (points.empty()) throw EmptyTrainingSet("clustering: no points");
  if (k_clusters < 1 || static_cast<std::size_t>(k_clusters) > points.size())
    throw Error("clustering: cluster count must lie between 1 and the point count");
}

}  // namespace

MstClusterResult mst_cluster(const LabeledDataset& points, int k_clusters, RandomSource& rng,
                             ResourceLedger& ledger) {
  validate_cluster_request(points, k_clusters);
  const std::size_t n = points.size();

  std::vector<char> in_tree(n, 0);
  in_tree[0] = 1;
  std::vector<double> best_link(n, kInfinity);
  std::vector<std::size_t> best_from(n, 0);
  for (std::size_t v = 1; v < n; ++v) best_link[v] = point_distance(points, 0, v);

  ledger.note_symbolic_cost(
      "spanning-tree oracle: cheapest-link-to-tree evaluation charged as one query; "
      "the simulator derives link values from stored geometry");

  std::vector<WeightedEdge> tree;
  bool exhausted = false;
  for (std::size_t step = 1; step < n; ++step) {
    // Search space: the outside vertices only, each valued at its cheapest
    // link into the tree.
    std::vector<std::size_t> outside;
    std::vector<double> candidates;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v]) {
        outside.push_back(v);
        candidates.push_back(best_link[v]);
      }
    OracleTable table(std::move(candidates));
    DurrHoyerResult dh = verified_minimum(table, rng, ledger, exhausted);

    const std::size_t chosen = outside[dh.index];
    tree.push_back(WeightedEdge{best_from[chosen], chosen, best_link[chosen]});
    in_tree[chosen] = 1;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v]) {
        const double d = point_distance(points, chosen, v);
        if (d < best_link[v]) {
          best_link[v] = d;
          best_from[v] = chosen;
        }
      }
  }
  return cut_clusters(n, std::move(tree), k_clusters);
}

MstClusterResult mst_cluster_classical(const LabeledDataset& points, int k_clusters,
                                       ResourceLedger& ledger) {
  validate_cluster_request(points, k_clusters);
  const std::size_t n = points.size();

  std::vector<char> in_tree(n, 0);
  in_tree[0] = 1;
  std::vector<double> best_link(n, kInfinity);
  std::vector<std::size_t> best_from(n, 0);
  for (std::size_t v = 1; v < n; ++v) {
    best_link[v] = point_distance(points, 0, v);
    ledger.charge_oracle_queries(1);  // one connection-matrix read per key
  }

  std::vector<WeightedEdge> tree;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t chosen = 0;
    double best = kInfinity;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && best_link[v] < best) {
        best = best_link[v];
        chosen = v;
      }
    tree.push_back(WeightedEdge{best_from[chosen], chosen, best_link[chosen]});
    in_tree[chosen] = 1;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v]) {
        const double d = point_distance(points, chosen, v);
        ledger.charge_oracle_queries(1);
        if (d < best_link[v]) {
          best_link[v] = d;
          best_from[v] = chosen;
        }
      }
  }
  return cut_clusters(n, std::move(tree), k_clusters);
}

}  // namespace qmldesk
