#pragma once

// Independent reference implementations the test suites compare against.
// Everything here is deliberately written from first principles (dense loops,
// exhaustive scans, textbook formulas) and must not call into the library
// code under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Complex = std::complex<double>;

// exp(-i H t) for Hermitian H via a dense eigendecomposition.
inline Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Partial trace over the qubits NOT in `keep` (bit 0 = most significant
// qubit), computed by direct index bookkeeping.
inline Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int num_qubits,
                                      const std::vector<int>& keep) {
  const int keep_count = static_cast<int>(keep.size());
  const std::uint64_t keep_dim = std::uint64_t(1) << keep_count;
  std::vector<int> traced;
  for (int q = 0; q < num_qubits; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const std::uint64_t traced_dim = std::uint64_t(1) << traced.size();

  // Builds a full index from kept and traced sub-indices; qubit q owns bit
  // (num_qubits - 1 - q) of the state index.
  auto assemble = [&](std::uint64_t kept_bits, std::uint64_t traced_bits) {
    std::uint64_t index = 0;
    for (int i = 0; i < keep_count; ++i)
      if (kept_bits >> (keep_count - 1 - i) & 1)
        index |= std::uint64_t(1) << (num_qubits - 1 - keep[static_cast<std::size_t>(i)]);
    for (std::size_t i = 0; i < traced.size(); ++i)
      if (traced_bits >> (traced.size() - 1 - i) & 1)
        index |= std::uint64_t(1) << (num_qubits - 1 - traced[i]);
    return index;
  };

  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(keep_dim),
                                                    static_cast<Eigen::Index>(keep_dim));
  for (std::uint64_t r = 0; r < keep_dim; ++r)
    for (std::uint64_t c = 0; c < keep_dim; ++c)
      for (std::uint64_t t = 0; t < traced_dim; ++t)
        reduced(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
            rho(static_cast<Eigen::Index>(assemble(r, t)),
                static_cast<Eigen::Index>(assemble(c, t)));
  return reduced;
}

// Squared Euclidean distance between u and the plain average of the class
// vectors.
inline double distance_to_mean_squared(const Eigen::VectorXd& u,
                                       const std::vector<Eigen::VectorXd>& cls) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(u.size());
  for (const Eigen::VectorXd& v : cls) mean += v;
  mean /= static_cast<double>(cls.size());
  return (u - mean).squaredNorm();
}

// Classical nearest centroid over per-class vector sets; ties break to the
// lowest class position.
inline std::size_t nearest_class(const Eigen::VectorXd& u,
                                 const std::vector<std::vector<Eigen::VectorXd>>& classes) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double d = distance_to_mean_squared(u, classes[c]);
    if (d < best_d - 1e-15) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Exhaustive scan over all binary weight vectors; returns the ones that
// classify every instance correctly under sign(w.x + bias) > 0.
inline std::vector<std::uint64_t> consistent_binary_weights(
    const std::vector<Eigen::VectorXd>& inputs, const std::vector<int>& labels,
    const std::vector<double>& biases, int width) {
  std::vector<std::uint64_t> good;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << width); ++mask) {
    bool all_ok = true;
    for (std::size_t t = 0; t < inputs.size() && all_ok; ++t) {
      double activation = biases[t];
      for (int i = 0; i < width; ++i)
        if (mask >> (width - 1 - i) & 1) activation += inputs[t](i);
      const int predicted = activation > 0.0 ? 1 : 0;
      all_ok = predicted == labels[t];
    }
    if (all_ok) good.push_back(mask);
  }
  return good;
}

// Plain k-nearest-neighbour majority vote; distance ties keep the earlier
// index, label ties go to the smallest label.
inline int knn_label(const Eigen::VectorXd& query, const std::vector<Eigen::VectorXd>& points,
                     const std::vector<int>& labels, int k) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (query - points[a]).norm() < (query - points[b]).norm();
  });
  std::map<int, int> votes;
  for (int i = 0; i < k; ++i) ++votes[labels[order[static_cast<std::size_t>(i)]]];
  int best = votes.begin()->first;
  for (const auto& [label, count] : votes)
    if (count > votes[best]) best = label;
  return best;
}

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 0.0;
};

// Kruskal's algorithm on the complete Euclidean graph.
inline std::vector<Edge> kruskal_mst(const std::vector<Eigen::VectorXd>& points) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      edges.push_back({i, j, (points[i] - points[j]).norm()});
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return a.w < b.w; });
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Edge> tree;
  for (const Edge& e : edges) {
    const std::size_t ru = find(e.u);
    const std::size_t rv = find(e.v);
    if (ru == rv) continue;
    parent[ru] = rv;
    tree.push_back(e);
    if (tree.size() + 1 == points.size()) break;
  }
  return tree;
}

// Cluster labels from cutting the k-1 heaviest tree edges; label ids follow
// the smallest member index of each cluster.
inline std::vector<int> single_linkage_clusters(const std::vector<Eigen::VectorXd>& points,
                                                int k) {
  std::vector<Edge> tree = kruskal_mst(points);
  std::stable_sort(tree.begin(), tree.end(),
                   [](const Edge& a, const Edge& b) { return a.w > b.w; });
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = static_cast<std::size_t>(std::max(0, k - 1)); i < tree.size(); ++i) {
    const std::size_t ru = find(tree[i].u);
    const std::size_t rv = find(tree[i].v);
    if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
  }
  std::map<std::size_t, int> ids;
  std::vector<int> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t root = find(i);
    auto [it, inserted] = ids.try_emplace(root, static_cast<int>(ids.size()));
    labels[i] = it->second;
  }
  return labels;
}

// Central finite difference of a scalar function.
template <typename F>
double finite_difference(const F& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Chi-square statistic for observed counts against uniform expectation.
inline double chi_square_uniform(const std::vector<std::int64_t>& counts, double total) {
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (std::int64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace oracles
