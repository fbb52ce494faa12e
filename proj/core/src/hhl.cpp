#include "qmldesk/hhl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "qmldesk/density.hpp"
#include "qmldesk/errors.hpp"
#include "qmldesk/gates.hpp"
#include "qmldesk/state.hpp"

namespace qmldesk {

namespace {

int bits_for(Eigen::Index count) {
  int bits = 1;
  while ((static_cast<Eigen::Index>(1) << bits) < count) ++bits;
  return bits;
}

bool is_hermitian(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= kHermitianTolerance;
}

struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

Spectrum decompose(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
  if (solver.info() != Eigen::Success)
    throw Error("linear solve: eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

struct GershgorinBounds {
  double lo = 0.0;
  double hi = 0.0;
};

GershgorinBounds gershgorin(const Eigen::MatrixXcd& a) {
  GershgorinBounds b;
  b.lo = std::numeric_limits<double>::infinity();
  b.hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double center = a(i, i).real();
    double radius = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (j != i) radius += std::abs(a(i, j));
    b.lo = std::min(b.lo, center - radius);
    b.hi = std::max(b.hi, center + radius);
  }
  return b;
}

// Dense Fourier gates are reused across solves; validating a 2^c x 2^c
// unitary is far more expensive than applying it.
const GateOp& cached_fourier_gate(int clock_qubits, bool inverse, int first_target) {
  static std::map<std::tuple<int, bool, int>, GateOp> cache;
  const auto key = std::make_tuple(clock_qubits, inverse, first_target);
  auto it = cache.find(key);
  if (it == cache.end()) {
    Eigen::MatrixXcd m = gates::fourier(clock_qubits);
    if (inverse) m.adjointInPlace();
    std::vector<int> targets(static_cast<std::size_t>(clock_qubits));
    for (int q = 0; q < clock_qubits; ++q)
      targets[static_cast<std::size_t>(q)] = first_target + q;
    it = cache.emplace(key, GateOp(std::move(m), std::move(targets))).first;
  }
  return it->second;
}

// Decodes a clock outcome into an eigenvalue. In the signed window the top
// half of the register represents negative values (two's complement).
double decode_eigenvalue(std::uint64_t k, int clock_qubits, double time, bool signed_window) {
  const auto dim = static_cast<std::int64_t>(1) << clock_qubits;
  auto value = static_cast<std::int64_t>(k);
  if (signed_window && value >= dim / 2) value -= dim;
  return 2.0 * M_PI * static_cast<double>(value) / (static_cast<double>(dim) * time);
}

// Shared register-estimation pass: Hadamards on the clock, controlled
// evolution powers, then the (inverse) Fourier transform. `first_clock` names
// the most significant clock qubit so callers can place registers in front.
struct EstimationPlan {
  Spectrum spectrum;
  double time = 0.0;
  int clock_qubits = 0;
  int input_qubits = 0;
  int first_clock = 0;
};

GateOp controlled_power(const EstimationPlan& plan, int clock_qubit, double steps) {
  Eigen::VectorXcd phases(plan.spectrum.values.size());
  for (Eigen::Index i = 0; i < plan.spectrum.values.size(); ++i)
    phases(i) = std::polar(1.0, plan.spectrum.values(i) * plan.time * steps);
  Eigen::MatrixXcd u = plan.spectrum.vectors * phases.asDiagonal() * plan.spectrum.vectors.adjoint();
  std::vector<int> targets;
  targets.push_back(clock_qubit);
  for (int q = 0; q < plan.input_qubits; ++q)
    targets.push_back(plan.first_clock + plan.clock_qubits + q);
  return GateOp(gates::controlled(std::move(u)), std::move(targets));
}

QuantumState forward_estimation(QuantumState state, const EstimationPlan& plan,
                                ResourceLedger& ledger) {
  for (int q = 0; q < plan.clock_qubits; ++q)
    state = apply_unitary(state, GateOp(gates::hadamard(), {plan.first_clock + q}), ledger);
  for (int m = 0; m < plan.clock_qubits; ++m) {
    const double weight = std::pow(2.0, plan.clock_qubits - 1 - m);
    state = apply_unitary(state, controlled_power(plan, plan.first_clock + m, weight), ledger);
  }
  return apply_unitary(state, cached_fourier_gate(plan.clock_qubits, true, plan.first_clock),
                       ledger);
}

QuantumState inverse_estimation(QuantumState state, const EstimationPlan& plan,
                                ResourceLedger& ledger) {
  state = apply_unitary(state, cached_fourier_gate(plan.clock_qubits, false, plan.first_clock),
                        ledger);
  for (int m = plan.clock_qubits - 1; m >= 0; --m) {
    const double weight = std::pow(2.0, plan.clock_qubits - 1 - m);
    state = apply_unitary(state, controlled_power(plan, plan.first_clock + m, -weight), ledger);
  }
  for (int q = 0; q < plan.clock_qubits; ++q)
    state = apply_unitary(state, GateOp(gates::hadamard(), {plan.first_clock + q}), ledger);
  return state;
}

// Conditional rotation |0>|k> -> cos(t_k)|0>|k> + sin(t_k)|1>|k> with
// sin(t_k) = c_rot / lambda_k, identity on filtered outcomes. Applied by
// direct index arithmetic; charged as one gate.
QuantumState apply_conditional_rotation(const QuantumState& state, int clock_qubits,
                                        int input_qubits, double time, double c_rot,
                                        double cutoff, bool signed_window,
                                        ResourceLedger& ledger) {
  const int n = state.num_qubits();
  Eigen::VectorXcd amps = state.amplitudes();
  const std::uint64_t anc_bit = 1ULL << (clock_qubits + input_qubits);
  const std::uint64_t clock_dim = 1ULL << clock_qubits;
  const std::uint64_t input_dim = 1ULL << input_qubits;
  for (std::uint64_t k = 0; k < clock_dim; ++k) {
    const double lambda = decode_eigenvalue(k, clock_qubits, time, signed_window);
    if (std::abs(lambda) < cutoff) continue;
    double s = c_rot / lambda;
    s = std::clamp(s, -1.0, 1.0);
    const double c = std::sqrt(1.0 - s * s);
    for (std::uint64_t i = 0; i < input_dim; ++i) {
      const std::uint64_t i0 = (k << input_qubits) | i;
      const std::uint64_t i1 = i0 | anc_bit;
      const Complex a0 = amps(static_cast<Eigen::Index>(i0));
      const Complex a1 = amps(static_cast<Eigen::Index>(i1));
      amps(static_cast<Eigen::Index>(i0)) = c * a0 - s * a1;
      amps(static_cast<Eigen::Index>(i1)) = s * a0 + c * a1;
    }
  }
  ledger.charge_gates();
  return QuantumState(n, std::move(amps));
}

Eigen::VectorXcd fix_phase(Eigen::VectorXcd v) {
  Eigen::Index best = 0;
  double best_mag = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::polar(1.0, -std::arg(v(best)));
  return v;
}

Eigen::Index count_nonzeros(const Eigen::MatrixXcd& a) {
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > 1e-12) ++count;
  return count;
}

}  // namespace

LinearSystem make_linear_system(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
  LinearSystem sys{a, b, is_hermitian(a)};
  return sys;
}

LinearSystem make_linear_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return make_linear_system(Eigen::MatrixXcd(a.cast<Complex>()),
                            Eigen::VectorXcd(b.cast<Complex>()));
}

LinearSystem hermitian_embed(const LinearSystem& sys) {
  if (sys.a.rows() != sys.b.size())
    throw DimensionMismatch("hermitian embed: right-hand side length does not match rows");
  if (is_hermitian(sys.a)) {
    LinearSystem out = sys;
    out.hermitian = true;
    return out;
  }
  const Eigen::Index rows = sys.a.rows();
  const Eigen::Index cols = sys.a.cols();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rows + cols, rows + cols);
  h.topRightCorner(rows, cols) = sys.a;
  h.bottomLeftCorner(cols, rows) = sys.a.adjoint();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows + cols);
  rhs.head(rows) = sys.b;
  return LinearSystem{std::move(h), std::move(rhs), true};
}

QuantumState phase_estimation(const Eigen::MatrixXcd& a, double time, const QuantumState& input,
                              int clock_qubits, ResourceLedger& ledger) {
  if (!is_hermitian(a)) throw InvalidState("phase estimation: matrix is not Hermitian");
  if (a.rows() != static_cast<Eigen::Index>(input.dim()))
    throw DimensionMismatch("phase estimation: matrix size does not match input state");
  if (time <= 0.0) throw Error("phase estimation: evolution time must be positive");
  if (clock_qubits < 1 || clock_qubits > 16)
    throw Error("phase estimation: clock register must have 1..16 qubits");

  EstimationPlan plan;
  plan.spectrum = decompose(a);
  plan.time = time;
  plan.clock_qubits = clock_qubits;
  plan.input_qubits = input.num_qubits();
  plan.first_clock = 0;

  for (Eigen::Index i = 0; i < plan.spectrum.values.size(); ++i) {
    const double phase = plan.spectrum.values(i) * time / (2.0 * M_PI);
    if (phase < -1e-12 || phase >= 1.0)
      throw EigenvalueOutOfRange("phase estimation: eigenvalue " +
                                 std::to_string(plan.spectrum.values(i)) +
                                 " has phase outside [0,1) at time " + std::to_string(time));
  }

  QuantumState state = QuantumState::zero(clock_qubits).tensor(input);
  return forward_estimation(std::move(state), plan, ledger);
}

HHLResult hhl_solve(const LinearSystem& sys, const HHLParams& params, RandomSource& rng,
                    ResourceLedger& ledger) {
  const Eigen::MatrixXcd& a = sys.a;
  const Eigen::VectorXcd& b = sys.b;
  if (a.rows() != a.cols()) throw DimensionMismatch("linear solve: matrix is not square");
  if (a.rows() != b.size())
    throw DimensionMismatch("linear solve: right-hand side length does not match matrix");
  if (!is_hermitian(a))
    throw InvalidState("linear solve: matrix is not Hermitian; embed it first");
  if (b.norm() == 0.0) throw ZeroVector("linear solve: zero right-hand side");
  if (params.clock_qubits < 1 || params.clock_qubits > 16)
    throw Error("linear solve: clock register must have 1..16 qubits");
  if (params.shots < 0) throw Error("linear solve: negative shot count");

  const Eigen::Index n_in = a.rows();
  const int input_qubits = bits_for(n_in);
  const auto dim = static_cast<Eigen::Index>(1) << input_qubits;
  // Padding keeps a unit diagonal so the extended block stays invertible.
  Eigen::MatrixXcd a_pad = Eigen::MatrixXcd::Identity(dim, dim);
  a_pad.topLeftCorner(n_in, n_in) = a;
  Eigen::VectorXcd b_pad = Eigen::VectorXcd::Zero(dim);
  b_pad.head(n_in) = b;

  EstimationPlan plan;
  plan.spectrum = decompose(a_pad);
  const GershgorinBounds bounds = gershgorin(a_pad);
  const bool signed_window = bounds.lo < 0.0;
  const double bound = std::max(std::abs(bounds.lo), std::abs(bounds.hi));
  if (bound == 0.0) throw SingularSystem("linear solve: zero matrix");

  const int c = params.clock_qubits;
  // Automatic time maps the largest eigenvalue magnitude onto the highest
  // exact clock bin of the usable window. The signed window stops short of
  // the two's-complement wrap at phase 1/2: anything on the half-bin next to
  // the wrap would leak mass across it and flip the inverted sign.
  const double window =
      signed_window ? 0.5 - std::pow(2.0, -c) : 1.0 - std::pow(2.0, -c);
  const double time = params.evolution_time > 0.0 ? params.evolution_time
                                                  : 2.0 * M_PI * window / bound;
  const auto clock_dim = static_cast<double>(static_cast<std::int64_t>(1) << c);
  const double bin = 2.0 * M_PI / (clock_dim * time);

  // Decoded bins between zero and the smallest eigenvalue that actually
  // carries right-hand-side weight hold nothing but estimation leakage, and
  // the 1/lambda inversion amplifies whatever lands there. The automatic
  // cutoff therefore clears that whole gap, staying a factor two below the
  // smallest participating eigenvalue; the half-bin floor always excludes the
  // unresolvable zero bin.
  const Eigen::VectorXcd beta = plan.spectrum.vectors.adjoint() * (b_pad / b_pad.norm());
  const double half_bin = 0.5 * bin;
  double smallest_participating = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    const double magnitude = std::abs(plan.spectrum.values(i));
    if (std::norm(beta(i)) > 1e-12 && magnitude >= half_bin)
      smallest_participating = std::min(smallest_participating, magnitude);
  }
  double auto_cutoff = half_bin;
  if (std::isfinite(smallest_participating))
    auto_cutoff = std::max(half_bin, 0.5 * smallest_participating);
  const double cutoff = params.eigenvalue_cutoff > 0.0 ? params.eigenvalue_cutoff : auto_cutoff;
  const double c_rot = params.inversion_constant > 0.0 ? params.inversion_constant : cutoff;
  if (c_rot > cutoff * (1.0 + 1e-12))
    throw Error("linear solve: inversion constant " + std::to_string(c_rot) +
                " exceeds the eigenvalue cutoff " + std::to_string(cutoff));

  for (Eigen::Index i = 0; i < plan.spectrum.values.size(); ++i) {
    const double phase = plan.spectrum.values(i) * time / (2.0 * M_PI);
    if (signed_window ? std::abs(phase) >= 0.5 : (phase < 0.0 || phase >= 1.0))
      throw EigenvalueOutOfRange("linear solve: eigenvalue " +
                                 std::to_string(plan.spectrum.values(i)) +
                                 " falls outside the phase window for time " +
                                 std::to_string(time));
  }

  // Weight of b on directions that survive the cutoff; if none do, the
  // filtered (pseudo-inverse) solution is identically zero.
  {
    double surviving = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i)
      if (std::abs(plan.spectrum.values(i)) >= cutoff) surviving += std::norm(beta(i));
    if (surviving < 1e-12)
      throw SingularSystem(
          "linear solve: every component of the right-hand side falls below the eigenvalue "
          "cutoff " +
          std::to_string(cutoff));
  }

  ledger.note_symbolic_cost(
      "hamiltonian simulation: dense exponentiation of a " + std::to_string(dim) + "x" +
      std::to_string(dim) + " matrix with " + std::to_string(count_nonzeros(a)) +
      " nonzeros; sparse-oracle methods would instead scale with the row sparsity");

  // Register layout: [ancilla][clock][input], ancilla most significant.
  const QuantumState b_state = prepare_amplitude_state(b_pad, ledger);
  QuantumState state = QuantumState::zero(1 + c).tensor(b_state);
  plan.time = time;
  plan.clock_qubits = c;
  plan.input_qubits = input_qubits;
  plan.first_clock = 1;

  state = forward_estimation(std::move(state), plan, ledger);

  HHLResult result;
  result.clock_qubits = c;
  result.evolution_time = time;
  result.inversion_constant = c_rot;
  result.eigenvalue_cutoff = cutoff;
  result.signed_window = signed_window;

  std::vector<int> clock_targets(static_cast<std::size_t>(c));
  for (int q = 0; q < c; ++q) clock_targets[static_cast<std::size_t>(q)] = 1 + q;
  const std::vector<double> clock_probs = measure_probabilities(state, clock_targets);
  for (std::uint64_t k = 0; k < clock_probs.size(); ++k)
    if (clock_probs[k] > 1e-9)
      result.eigenvalues.push_back({decode_eigenvalue(k, c, time, signed_window), clock_probs[k]});
  std::stable_sort(result.eigenvalues.begin(), result.eigenvalues.end(),
                   [](const EigenvalueEstimate& x, const EigenvalueEstimate& y) {
                     return x.weight > y.weight;
                   });

  state = apply_conditional_rotation(state, c, input_qubits, time, c_rot, cutoff, signed_window,
                                     ledger);
  state = inverse_estimation(std::move(state), plan, ledger);

  // Post-selection keeps runs with ancilla 1 and a fully uncomputed clock.
  const std::uint64_t anc_bit = 1ULL << (c + input_qubits);
  Eigen::VectorXcd slice(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    slice(i) = state.amplitude(anc_bit | static_cast<std::uint64_t>(i));
  result.success_probability = slice.squaredNorm();
  if (result.success_probability < 1e-16)
    throw SingularSystem("linear solve: post-selection has vanishing success probability");

  if (params.shots > 0) {
    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < params.shots; ++s)
      if (rng.bernoulli(result.success_probability)) ++hits;
    ledger.charge_shots(params.shots);
    if (hits == 0)
      throw PostSelectionFailed("linear solve: no successful post-selection in " +
                                std::to_string(params.shots) + " shots");
    result.estimated_success = static_cast<double>(hits) / static_cast<double>(params.shots);
  } else {
    result.estimated_success = result.success_probability;
  }

  const Eigen::VectorXcd normalized = fix_phase(slice / slice.norm());
  result.solution_state = QuantumState(input_qubits, normalized);
  return result;
}

EmbeddedSolveResult solve_rectangular(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& y,
                                      const HHLParams& params, RandomSource& rng,
                                      ResourceLedger& ledger) {
  if (a.rows() != y.size())
    throw DimensionMismatch("embedded solve: right-hand side length does not match rows");
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  const LinearSystem embedded = hermitian_embed(LinearSystem{a, y, false});
  const bool block_embedded = embedded.a.rows() == rows + cols;

  EmbeddedSolveResult result;
  result.detail = hhl_solve(embedded, params, rng, ledger);
  // With block matrix [[0, A], [A^dagger, 0]] and right-hand side (y, 0), the
  // least-norm solution is (0, A^+ y): the solution sits after the first
  // `rows` coordinates. A Hermitian input skips the embedding entirely.
  Eigen::VectorXcd block =
      block_embedded ? result.detail.solution_state.amplitudes().segment(rows, cols)
                     : result.detail.solution_state.amplitudes().head(cols);
  const double norm = block.norm();
  if (norm == 0.0)
    throw SingularSystem("embedded solve: right-hand side is orthogonal to the column space");
  result.solution = fix_phase(block / norm);
  result.solution_weight = norm * norm;
  return result;
}

QuadraticMinimizeResult quadratic_minimize(const QuadraticForm& form, const HHLParams& params,
                                           RandomSource& rng, ResourceLedger& ledger) {
  const Eigen::MatrixXd& a = form.a;
  const Eigen::VectorXd& b = form.b;
  if (a.rows() != a.cols()) throw DimensionMismatch("quadratic minimize: matrix is not square");
  if (a.rows() != b.size())
    throw DimensionMismatch("quadratic minimize: linear term length does not match matrix");
  if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > kHermitianTolerance)
    throw InvalidState("quadratic minimize: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite("quadratic minimize: matrix is not positive definite");

  QuadraticMinimizeResult result;
  if (b.norm() == 0.0) {
    result.zero_solution = true;
    result.minimizer = Eigen::VectorXd::Zero(b.size());
    result.value = form.c;
    return result;
  }

  // Stationarity: gradient 2Ax + b = 0, i.e. A x = -b/2.
  const Eigen::VectorXd rhs = -0.5 * b;
  const HHLResult detail = hhl_solve(make_linear_system(a, rhs), params, rng, ledger);

  Eigen::VectorXd direction = detail.solution_state.amplitudes().head(b.size()).real();
  direction.normalize();
  if (direction.dot(rhs) < 0.0) direction = -direction;
  const double scale =
      std::sqrt(detail.estimated_success) * rhs.norm() / detail.inversion_constant;
  result.solution_state = detail.solution_state;
  result.success_probability = detail.success_probability;
  result.minimizer = scale * direction;
  result.value = result.minimizer.dot(a * result.minimizer) + b.dot(result.minimizer) + form.c;
  return result;
}

double solution_fidelity(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  if (x.size() != y.size()) throw DimensionMismatch("fidelity: vector lengths differ");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw ZeroVector("fidelity: zero vector");
  const double overlap = std::abs(x.dot(y)) / (nx * ny);
  return overlap * overlap;
}

}  // namespace qmldesk
