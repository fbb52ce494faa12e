#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/hhl.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"
#include "qmldesk/state.hpp"

namespace qmldesk {

// Labeled binary training instances (x^t, y^t) with an optional per-instance
// bias. Inputs are {0,1} vectors of a common width W; labels are {0,1}.
class PerceptronTrainingSet {
 public:
  void add(const Eigen::VectorXd& input, int label, double bias = 0.0);

  std::size_t size() const { return inputs_.size(); }
  bool empty() const { return inputs_.empty(); }
  // W, the shared input width.
  int width() const;
  const Eigen::VectorXd& input(std::size_t t) const { return inputs_.at(t); }
  int label(std::size_t t) const { return labels_.at(t); }
  double bias(std::size_t t) const { return biases_.at(t); }

 private:
  std::vector<Eigen::VectorXd> inputs_;
  std::vector<int> labels_;
  std::vector<double> biases_;
};

// Trained weights held in a W-qubit register whose dominant basis state spells
// out the binary weight vector. The decoded pattern and the scale-recovered
// real solution are kept alongside for inspection.
struct WeightState {
  QuantumState register_state = QuantumState::zero(1);
  Eigen::VectorXi decoded_weights;
  Eigen::VectorXd solution;
  double residual = 0.0;
  double success_probability = 0.0;
  bool least_squares = false;
};

// Activation threshold: predict 1 when w.x + bias > 0.
struct ActivationRule {
  double bias = 0.0;
};

// Stacks the training inputs into matrix rows with right-hand side y - bias.
// Throws EmptyTrainingSet on an empty set and ZeroTarget when the right-hand
// side vanishes identically.
LinearSystem assemble_system(const PerceptronTrainingSet& ts);

// Solves the assembled system through the eigenvalue-inversion solver (with
// Hermitian embedding when rectangular) and rounds the recovered solution to
// a binary weight register. Without least_squares the training set must be
// exactly solvable.
WeightState train_weights(const PerceptronTrainingSet& ts, const HHLParams& params,
                          RandomSource& rng, ResourceLedger& ledger, bool least_squares = false);

struct ClassificationDetail {
  int label = 0;
  // Probability that the activation count exceeds the threshold.
  double positive_probability = 0.0;
  // Largest entry-wise change of the weight register's reduced density
  // operator across the circuit; zero for basis-state registers.
  double register_deviation = 0.0;
};

// Simulates the ancilla-scratchpad circuit: one Toffoli per coordinate,
// controlled on a weight qubit and a data qubit, targeting a fresh ancilla.
// Output is 1 when the ancilla count exceeds -bias with probability > 1/2.
// The weight register is a control throughout and is left reusable.
ClassificationDetail classify_details(const WeightState& weights, const Eigen::VectorXd& input,
                                      const ActivationRule& rule, ResourceLedger& ledger);
int classify(const WeightState& weights, const Eigen::VectorXd& input, const ActivationRule& rule,
             ResourceLedger& ledger);

struct BaselineWeights {
  Eigen::VectorXd weights;
  int iterations = 0;
  bool converged = true;
  double residual = 0.0;
};

// Classical reference solvers for the same training set: the iterative
// mistake-driven perceptron, a direct least-squares solve, and conjugate
// gradients on the normal equations. Non-convergence is reported through the
// flag rather than an exception.
struct ClassicalBaselines {
  BaselineWeights perceptron;
  BaselineWeights least_squares;
  BaselineWeights conjugate_gradient;
};
ClassicalBaselines classical_baselines(const PerceptronTrainingSet& ts,
                                       int max_iterations = 1000);

}  // namespace qmldesk
