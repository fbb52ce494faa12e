#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/ledger.hpp"

namespace qmldesk {

// Exact-enumeration limit on visible plus hidden units.
inline constexpr int kBoltzmannUnitCap = 20;

// Bipartite visible-hidden Boltzmann machine with energy
//   E(v, h) = -a.v - b.h - v^T W h
// over binary unit values.
struct BoltzmannMachine {
  Eigen::VectorXd visible_bias;  // a, length n_v
  Eigen::VectorXd hidden_bias;   // b, length n_h
  Eigen::MatrixXd weights;       // n_v x n_h
};

double boltzmann_energy(const BoltzmannMachine& bm, const Eigen::VectorXd& visible,
                        const Eigen::VectorXd& hidden);

// Weighted set of binary visible patterns; duplicates merge their weights and
// reported weights are normalized to sum 1.
class BinaryDataset {
 public:
  void add(const Eigen::VectorXd& pattern, double weight = 1.0);

  std::size_t size() const { return patterns_.size(); }
  bool empty() const { return patterns_.empty(); }
  Eigen::Index dimension() const;

  Eigen::VectorXd pattern(std::size_t i) const;
  double weight(std::size_t i) const;  // normalized

 private:
  Eigen::Index dimension_ = 0;
  std::vector<std::uint32_t> patterns_;  // bit i of unit i counted from the MSB side
  std::vector<double> raw_weights_;
  double total_weight_ = 0.0;
};

// Joint distribution over all (v, h) configurations, indexed by
// (visible index << n_h) | hidden index with unit 0 in the top bit of its
// block.
struct GibbsTable {
  int n_v = 0;
  int n_h = 0;
  std::vector<double> probabilities;
  double log_partition = 0.0;
};

GibbsTable gibbs_distribution(const BoltzmannMachine& bm);

double log_likelihood(const BoltzmannMachine& bm, const BinaryDataset& data);

// Log-likelihood gradient, laid out like the parameters.
struct BoltzmannGradient {
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd weights;
};

// d LL / d theta = data expectation - model expectation, with the data term
// using the exact conditional P(h|v) and the model term the full Gibbs table.
BoltzmannGradient exact_gradient(const BoltzmannMachine& bm, const BinaryDataset& data);

// Self-consistent factorized magnetizations: m_v = sigma(a + W m_h),
// m_h = sigma(b + W^T m_v), iterated with damping 0.5 until the sweep
// residual drops below 1e-8 (at most 500 sweeps). Throws
// MeanFieldNonConvergence with the final residual otherwise.
struct MeanFieldSolution {
  Eigen::VectorXd visible;
  Eigen::VectorXd hidden;
  int sweeps = 0;
  double residual = 0.0;
  std::vector<double> residual_trace;  // one entry per sweep
};

MeanFieldSolution mean_field_magnetizations(const BoltzmannMachine& bm);

// Same data term as exact_gradient; model expectations replaced by products
// of mean-field magnetizations.
BoltzmannGradient mean_field_gradient(const BoltzmannMachine& bm, const BinaryDataset& data);

enum class GradientBackend { exact, mean_field };

struct TrainConfig {
  GradientBackend backend = GradientBackend::exact;
  int steps = 100;
  double learning_rate = 0.1;
  // Scaling factor of the quantum Gibbs sampler's symbolic cost note; the
  // source material leaves it a free parameter.
  std::optional<double> kappa;
};

struct TrainResult {
  BoltzmannMachine machine;
  std::vector<double> log_likelihood_trace;  // initial value, then one per step
};

// Gradient ascent on the log-likelihood; the trace is always evaluated
// exactly so backends stay comparable.
TrainResult train_bm(const BoltzmannMachine& bm, const BinaryDataset& data,
                     const TrainConfig& config, ResourceLedger& ledger);

}  // namespace qmldesk
