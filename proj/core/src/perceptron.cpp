#include "qmldesk/perceptron.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/IterativeLinearSolvers>

#include "qmldesk/density.hpp"
#include "qmldesk/errors.hpp"
#include "qmldesk/gates.hpp"

namespace qmldesk {

namespace {

bool is_binary_entry(double v) { return std::abs(v) <= 1e-9 || std::abs(v - 1.0) <= 1e-9; }

std::uint64_t pattern_index(const Eigen::VectorXd& bits) {
  std::uint64_t index = 0;
  for (Eigen::Index j = 0; j < bits.size(); ++j)
    index = (index << 1) | (bits(j) > 0.5 ? 1ULL : 0ULL);
  return index;
}

}  // namespace

void PerceptronTrainingSet::add(const Eigen::VectorXd& input, int label, double bias) {
  if (input.size() == 0) throw ZeroVector("training set: empty input vector");
  if (!inputs_.empty() && input.size() != inputs_.front().size())
    throw DimensionMismatch("training set: input width " + std::to_string(input.size()) +
                            " does not match established width " +
                            std::to_string(inputs_.front().size()));
  for (Eigen::Index j = 0; j < input.size(); ++j)
    if (!is_binary_entry(input(j)))
      throw InvalidState("training set: input entries must be 0 or 1");
  if (label != 0 && label != 1)
    throw InvalidState("training set: labels must be 0 or 1");
  if (!std::isfinite(bias)) throw InvalidState("training set: bias must be finite");
  inputs_.push_back(input);
  labels_.push_back(label);
  biases_.push_back(bias);
}

int PerceptronTrainingSet::width() const {
  if (inputs_.empty()) throw EmptyTrainingSet("training set: no instances");
  return static_cast<int>(inputs_.front().size());
}

LinearSystem assemble_system(const PerceptronTrainingSet& ts) {
  if (ts.empty()) throw EmptyTrainingSet("assemble: no training instances");
  const auto n = static_cast<Eigen::Index>(ts.size());
  const Eigen::Index w = ts.width();
  Eigen::MatrixXd a(n, w);
  Eigen::VectorXd target(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    a.row(t) = ts.input(static_cast<std::size_t>(t)).transpose();
    target(t) = static_cast<double>(ts.label(static_cast<std::size_t>(t))) -
                ts.bias(static_cast<std::size_t>(t));
  }
  if (target.cwiseAbs().maxCoeff() == 0.0)
    throw ZeroTarget("assemble: right-hand side is identically zero");
  return make_linear_system(Eigen::MatrixXcd(a.cast<Complex>()),
                            Eigen::VectorXcd(target.cast<Complex>()));
}

WeightState train_weights(const PerceptronTrainingSet& ts, const HHLParams& params,
                          RandomSource& rng, ResourceLedger& ledger, bool least_squares) {
  const LinearSystem sys = assemble_system(ts);
  const Eigen::MatrixXd a = sys.a.real();
  const Eigen::VectorXd target = sys.b.real();

  // Consistency is a property of the data, so it is judged classically; the
  // solver's own approximation error must not mask an inconsistent set.
  const Eigen::VectorXd reference =
      a.completeOrthogonalDecomposition().solve(target);
  const double reference_residual = (a * reference - target).norm();
  if (!least_squares && reference_residual > 1e-8 * std::max(1.0, target.norm()))
    throw InvalidState("train: training set has no exact solution (residual " +
                       std::to_string(reference_residual) +
                       "); rerun in least-squares mode");

  bool basis_target = true;
  for (Eigen::Index t = 0; t < target.size(); ++t)
    if (!is_binary_entry(target(t))) basis_target = false;
  if (basis_target)
    ledger.note_symbolic_cost(
        "target preparation: right-hand side is a computational basis pattern; "
        "preparation circuit has depth 1");

  const EmbeddedSolveResult solve = solve_rectangular(sys.a, sys.b, params, rng, ledger);
  const double scale = std::sqrt(solve.detail.estimated_success) * target.norm() /
                       solve.detail.inversion_constant * std::sqrt(solve.solution_weight);

  const Eigen::VectorXd direction = solve.solution.real();
  const Eigen::VectorXd plus = scale * direction;
  const double plus_residual = (a * plus - target).norm();
  const double minus_residual = (a * (-plus) - target).norm();
  const Eigen::VectorXd recovered = plus_residual <= minus_residual ? plus : (-plus).eval();

  WeightState state;
  state.solution = recovered;
  state.residual = std::min(plus_residual, minus_residual);
  state.success_probability = solve.detail.success_probability;
  state.least_squares = least_squares;
  state.decoded_weights = Eigen::VectorXi(recovered.size());
  for (Eigen::Index j = 0; j < recovered.size(); ++j)
    state.decoded_weights(j) = recovered(j) > 0.5 ? 1 : 0;

  const int w = static_cast<int>(recovered.size());
  std::uint64_t index = 0;
  for (Eigen::Index j = 0; j < recovered.size(); ++j)
    index = (index << 1) | static_cast<std::uint64_t>(state.decoded_weights(j));
  state.register_state = QuantumState::basis(w, index);
  ledger.charge_qubits(w);
  ledger.charge_state_preparations();
  return state;
}

namespace {

struct CircuitRun {
  QuantumState state = QuantumState::zero(1);
  double positive_probability = 0.0;
};

CircuitRun run_activation_circuit(const WeightState& weights, const Eigen::VectorXd& input,
                                  const ActivationRule& rule, ResourceLedger& ledger) {
  const int w = weights.register_state.num_qubits();
  if (static_cast<int>(input.size()) != w)
    throw DimensionMismatch("classify: input width " + std::to_string(input.size()) +
                            " does not match weight register of " + std::to_string(w) +
                            " qubits");
  for (Eigen::Index j = 0; j < input.size(); ++j)
    if (!is_binary_entry(input(j)))
      throw InvalidState("classify: input entries must be 0 or 1");

  // Layout: weight qubits, data qubits, ancilla qubits.
  CircuitRun run;
  run.state = weights.register_state.tensor(QuantumState::basis(w, pattern_index(input)))
                  .tensor(QuantumState::zero(w));
  for (int j = 0; j < w; ++j)
    run.state =
        apply_unitary(run.state, GateOp(gates::toffoli(), {j, w + j, 2 * w + j}), ledger);

  std::vector<int> ancillas(static_cast<std::size_t>(w));
  for (int j = 0; j < w; ++j) ancillas[static_cast<std::size_t>(j)] = 2 * w + j;
  const std::vector<double> probs = measure_probabilities(run.state, ancillas);
  const double threshold = -rule.bias;
  for (std::uint64_t pattern = 0; pattern < probs.size(); ++pattern)
    if (static_cast<double>(std::popcount(pattern)) > threshold)
      run.positive_probability += probs[pattern];
  return run;
}

}  // namespace

ClassificationDetail classify_details(const WeightState& weights, const Eigen::VectorXd& input,
                                      const ActivationRule& rule, ResourceLedger& ledger) {
  const CircuitRun run = run_activation_circuit(weights, input, rule, ledger);
  const int w = weights.register_state.num_qubits();
  std::vector<int> weight_qubits(static_cast<std::size_t>(w));
  for (int j = 0; j < w; ++j) weight_qubits[static_cast<std::size_t>(j)] = j;

  const DensityMatrix before = DensityMatrix::from_state(weights.register_state);
  const DensityMatrix after = reduced_density(run.state, weight_qubits);

  ClassificationDetail detail;
  detail.positive_probability = run.positive_probability;
  detail.label = run.positive_probability > 0.5 ? 1 : 0;
  detail.register_deviation = (after.entries() - before.entries()).cwiseAbs().maxCoeff();
  return detail;
}

int classify(const WeightState& weights, const Eigen::VectorXd& input, const ActivationRule& rule,
             ResourceLedger& ledger) {
  return run_activation_circuit(weights, input, rule, ledger).positive_probability > 0.5 ? 1 : 0;
}

ClassicalBaselines classical_baselines(const PerceptronTrainingSet& ts, int max_iterations) {
  if (ts.empty()) throw EmptyTrainingSet("baselines: no training instances");
  if (max_iterations < 1) throw Error("baselines: max iterations must be positive");
  const auto n = static_cast<Eigen::Index>(ts.size());
  const Eigen::Index w = ts.width();
  Eigen::MatrixXd a(n, w);
  Eigen::VectorXd target(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    a.row(t) = ts.input(static_cast<std::size_t>(t)).transpose();
    target(t) = static_cast<double>(ts.label(static_cast<std::size_t>(t))) -
                ts.bias(static_cast<std::size_t>(t));
  }

  ClassicalBaselines out;

  // Mistake-driven updates until a full clean pass.
  {
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(w);
    int pass = 0;
    bool clean = false;
    while (pass < max_iterations && !clean) {
      ++pass;
      clean = true;
      for (Eigen::Index t = 0; t < n; ++t) {
        const double activation =
            weights.dot(a.row(t)) + ts.bias(static_cast<std::size_t>(t));
        const int predicted = activation > 0.0 ? 1 : 0;
        const int err = ts.label(static_cast<std::size_t>(t)) - predicted;
        if (err != 0) {
          weights += static_cast<double>(err) * a.row(t).transpose();
          clean = false;
        }
      }
    }
    out.perceptron.weights = weights;
    out.perceptron.iterations = pass;
    out.perceptron.converged = clean;
    out.perceptron.residual = (a * weights - target).norm();
  }

  // Direct minimum-norm least squares.
  {
    out.least_squares.weights = a.completeOrthogonalDecomposition().solve(target);
    out.least_squares.iterations = 1;
    out.least_squares.residual = (a * out.least_squares.weights - target).norm();
  }

  // Conjugate gradients on the normal equations.
  {
    const Eigen::MatrixXd gram = a.transpose() * a;
    const Eigen::VectorXd rhs = a.transpose() * target;
    Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
    cg.setMaxIterations(max_iterations);
    cg.setTolerance(1e-12);
    cg.compute(gram);
    out.conjugate_gradient.weights = cg.solve(rhs);
    out.conjugate_gradient.iterations = static_cast<int>(cg.iterations());
    out.conjugate_gradient.converged = cg.info() == Eigen::Success;
    out.conjugate_gradient.residual =
        (a * out.conjugate_gradient.weights - target).norm();
  }

  return out;
}

}  // namespace qmldesk
