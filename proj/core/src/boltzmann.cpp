#include "qmldesk/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmldesk/errors.hpp"

namespace qmldesk {

namespace {

void validate_machine(const BoltzmannMachine& bm) {
  const Eigen::Index n_v = bm.visible_bias.size();
  const Eigen::Index n_h = bm.hidden_bias.size();
  if (n_v < 1 || n_h < 1)
    throw Error("boltzmann machine: need at least one visible and one hidden unit");
  if (bm.weights.rows() != n_v || bm.weights.cols() != n_h)
    throw DimensionMismatch("boltzmann machine: weight matrix must be n_v x n_h");
  if (n_v + n_h > kBoltzmannUnitCap)
    throw SizeCapExceeded("boltzmann machine: " + std::to_string(n_v + n_h) +
                          " units exceed the exact-enumeration cap of " +
                          std::to_string(kBoltzmannUnitCap));
}

void validate_data(const BoltzmannMachine& bm, const BinaryDataset& data) {
  if (data.empty()) throw EmptyTrainingSet("boltzmann training: empty dataset");
  if (data.dimension() != bm.visible_bias.size())
    throw DimensionMismatch("boltzmann training: pattern length differs from n_v");
}

Eigen::VectorXd bits_to_vector(std::uint32_t bits, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = (bits >> (n - 1 - i)) & 1u ? 1.0 : 0.0;
  return v;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -E(v, h) for every configuration, indexed (v << n_h) | h.
std::vector<double> negative_energies(const BoltzmannMachine& bm) {
  const auto n_v = static_cast<int>(bm.visible_bias.size());
  const auto n_h = static_cast<int>(bm.hidden_bias.size());
  std::vector<double> neg(static_cast<std::size_t>(1) << (n_v + n_h));
  for (std::uint32_t vi = 0; vi < (1u << n_v); ++vi) {
    const Eigen::VectorXd v = bits_to_vector(vi, n_v);
    const double av = bm.visible_bias.dot(v);
    const Eigen::VectorXd field = bm.hidden_bias + bm.weights.transpose() * v;
    for (std::uint32_t hi = 0; hi < (1u << n_h); ++hi) {
      const Eigen::VectorXd h = bits_to_vector(hi, n_h);
      neg[(static_cast<std::size_t>(vi) << n_h) | hi] = av + field.dot(h);
    }
  }
  return neg;
}

double log_sum_exp(const std::vector<double>& xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - top);
  return top + std::log(sum);
}

// Data half of the gradient: exact conditional expectations of the hidden
// units given each pattern.
BoltzmannGradient data_expectations(const BoltzmannMachine& bm, const BinaryDataset& data) {
  BoltzmannGradient g;
  g.visible_bias = Eigen::VectorXd::Zero(bm.visible_bias.size());
  g.hidden_bias = Eigen::VectorXd::Zero(bm.hidden_bias.size());
  g.weights = Eigen::MatrixXd::Zero(bm.weights.rows(), bm.weights.cols());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd v = data.pattern(i);
    const double weight = data.weight(i);
    const Eigen::VectorXd h_mean =
        (bm.hidden_bias + bm.weights.transpose() * v).unaryExpr([](double x) {
          return sigmoid(x);
        });
    g.visible_bias += weight * v;
    g.hidden_bias += weight * h_mean;
    g.weights += weight * v * h_mean.transpose();
  }
  return g;
}

}  // namespace

double boltzmann_energy(const BoltzmannMachine& bm, const Eigen::VectorXd& visible,
                        const Eigen::VectorXd& hidden) {
  validate_machine(bm);
  if (visible.size() != bm.visible_bias.size() || hidden.size() != bm.hidden_bias.size())
    throw DimensionMismatch("boltzmann energy: unit-vector lengths");
  return -bm.visible_bias.dot(visible) - bm.hidden_bias.dot(hidden) -
         visible.dot(bm.weights * hidden);
}

void BinaryDataset::add(const Eigen::VectorXd& pattern, double weight) {
  if (pattern.size() < 1) throw ZeroVector("binary dataset: empty pattern");
  if (pattern.size() > 32) throw SizeCapExceeded("binary dataset: pattern too long");
  if (weight <= 0.0) throw Error("binary dataset: weights must be positive");
  if (patterns_.empty())
    dimension_ = pattern.size();
  else if (pattern.size() != dimension_)
    throw DimensionMismatch("binary dataset: pattern length differs from the first row");

  std::uint32_t bits = 0;
  for (Eigen::Index i = 0; i < pattern.size(); ++i) {
    const double x = pattern(i);
    if (std::abs(x) > 1e-9 && std::abs(x - 1.0) > 1e-9)
      throw InvalidState("binary dataset: entries must be 0 or 1");
    if (x > 0.5) bits |= 1u << (pattern.size() - 1 - i);
  }

  for (std::size_t i = 0; i < patterns_.size(); ++i)
    if (patterns_[i] == bits) {
      raw_weights_[i] += weight;
      total_weight_ += weight;
      return;
    }
  patterns_.push_back(bits);
  raw_weights_.push_back(weight);
  total_weight_ += weight;
}

Eigen::Index BinaryDataset::dimension() const {
  if (patterns_.empty()) throw EmptyTrainingSet("binary dataset: no patterns yet");
  return dimension_;
}

Eigen::VectorXd BinaryDataset::pattern(std::size_t i) const {
  return bits_to_vector(patterns_.at(i), dimension_);
}

double BinaryDataset::weight(std::size_t i) const {
  return raw_weights_.at(i) / total_weight_;
}

GibbsTable gibbs_distribution(const BoltzmannMachine& bm) {
  validate_machine(bm);
  GibbsTable table;
  table.n_v = static_cast<int>(bm.visible_bias.size());
  table.n_h = static_cast<int>(bm.hidden_bias.size());
  const std::vector<double> neg = negative_energies(bm);
  table.log_partition = log_sum_exp(neg);
  table.probabilities.resize(neg.size());
  for (std::size_t i = 0; i < neg.size(); ++i)
    table.probabilities[i] = std::exp(neg[i] - table.log_partition);
  return table;
}

double log_likelihood(const BoltzmannMachine& bm, const BinaryDataset& data) {
  validate_machine(bm);
  validate_data(bm, data);
  const auto n_h = static_cast<int>(bm.hidden_bias.size());
  const double log_z = log_sum_exp(negative_energies(bm));
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd v = data.pattern(i);
    const double av = bm.visible_bias.dot(v);
    const Eigen::VectorXd field = bm.hidden_bias + bm.weights.transpose() * v;
    std::vector<double> neg(static_cast<std::size_t>(1) << n_h);
    for (std::uint32_t hi = 0; hi < (1u << n_h); ++hi)
      neg[hi] = av + field.dot(bits_to_vector(hi, n_h));
    ll += data.weight(i) * (log_sum_exp(neg) - log_z);
  }
  return ll;
}

BoltzmannGradient exact_gradient(const BoltzmannMachine& bm, const BinaryDataset& data) {
  validate_machine(bm);
  validate_data(bm, data);
  BoltzmannGradient g = data_expectations(bm, data);

  const GibbsTable table = gibbs_distribution(bm);
  const auto n_v = static_cast<Eigen::Index>(table.n_v);
  const auto n_h = static_cast<Eigen::Index>(table.n_h);
  for (std::uint32_t vi = 0; vi < (1u << table.n_v); ++vi) {
    const Eigen::VectorXd v = bits_to_vector(vi, n_v);
    for (std::uint32_t hi = 0; hi < (1u << table.n_h); ++hi) {
      const double p = table.probabilities[(static_cast<std::size_t>(vi) << table.n_h) | hi];
      const Eigen::VectorXd h = bits_to_vector(hi, n_h);
      g.visible_bias -= p * v;
      g.hidden_bias -= p * h;
      g.weights -= p * v * h.transpose();
    }
  }
  return g;
}

MeanFieldSolution mean_field_magnetizations(const BoltzmannMachine& bm) {
  validate_machine(bm);
  constexpr double kDamping = 0.5;
  constexpr double kTolerance = 1e-8;
  constexpr int kMaxSweeps = 500;

  MeanFieldSolution sol;
  sol.visible = Eigen::VectorXd::Constant(bm.visible_bias.size(), 0.5);
  sol.hidden = Eigen::VectorXd::Constant(bm.hidden_bias.size(), 0.5);
  for (sol.sweeps = 0; sol.sweeps < kMaxSweeps; ++sol.sweeps) {
    const Eigen::VectorXd next_v =
        (bm.visible_bias + bm.weights * sol.hidden).unaryExpr([](double x) {
          return sigmoid(x);
        });
    const Eigen::VectorXd next_h =
        (bm.hidden_bias + bm.weights.transpose() * next_v).unaryExpr([](double x) {
          return sigmoid(x);
        });
    const Eigen::VectorXd damped_v = kDamping * next_v + (1.0 - kDamping) * sol.visible;
    const Eigen::VectorXd damped_h = kDamping * next_h + (1.0 - kDamping) * sol.hidden;
    sol.residual = std::max((damped_v - sol.visible).cwiseAbs().maxCoeff(),
                            (damped_h - sol.hidden).cwiseAbs().maxCoeff());
    sol.visible = damped_v;
    sol.hidden = damped_h;
    sol.residual_trace.push_back(sol.residual);
    if (sol.residual < kTolerance) {
      ++sol.sweeps;
      return sol;
    }
  }
  throw MeanFieldNonConvergence("mean field: residual " + std::to_string(sol.residual) +
                                " after " + std::to_string(kMaxSweeps) + " sweeps");
}

BoltzmannGradient mean_field_gradient(const BoltzmannMachine& bm, const BinaryDataset& data) {
  validate_machine(bm);
  validate_data(bm, data);
  BoltzmannGradient g = data_expectations(bm, data);
  const MeanFieldSolution mf = mean_field_magnetizations(bm);
  g.visible_bias -= mf.visible;
  g.hidden_bias -= mf.hidden;
  g.weights -= mf.visible * mf.hidden.transpose();
  return g;
}

TrainResult train_bm(const BoltzmannMachine& bm, const BinaryDataset& data,
                     const TrainConfig& config, ResourceLedger& ledger) {
  validate_machine(bm);
  validate_data(bm, data);
  if (config.steps < 0) throw Error("training: negative step count");
  if (config.learning_rate <= 0.0) throw Error("training: learning rate must be positive");

  ledger.charge_qubits(bm.visible_bias.size() + bm.hidden_bias.size());
  const std::string kappa = config.kappa.has_value()
                                ? "kappa = " + std::to_string(*config.kappa)
                                : "kappa left as a free parameter";
  ledger.note_symbolic_cost(
      "quantum Gibbs sampling cost per gradient: O~(N E sqrt(kappa)) with " + kappa);

  TrainResult result;
  result.machine = bm;
  result.log_likelihood_trace.push_back(log_likelihood(result.machine, data));
  for (int step = 0; step < config.steps; ++step) {
    const BoltzmannGradient g = config.backend == GradientBackend::exact
                                    ? exact_gradient(result.machine, data)
                                    : mean_field_gradient(result.machine, data);
    result.machine.visible_bias += config.learning_rate * g.visible_bias;
    result.machine.hidden_bias += config.learning_rate * g.hidden_bias;
    result.machine.weights += config.learning_rate * g.weights;
    ledger.charge_state_preparations(1);
    result.log_likelihood_trace.push_back(log_likelihood(result.machine, data));
  }
  return result;
}

}  // namespace qmldesk
