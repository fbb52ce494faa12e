#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"
#include "qmldesk/state.hpp"

namespace qmldesk {

// A (possibly non-Hermitian) linear system A x = b.
struct LinearSystem {
  Eigen::MatrixXcd a;
  Eigen::VectorXcd b;
  bool hermitian = false;
};

// Builds a LinearSystem and sets the hermitian flag from the matrix itself.
LinearSystem make_linear_system(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b);
LinearSystem make_linear_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Tuning knobs for the eigenvalue-inversion solver. Non-positive values for
// evolution_time, eigenvalue_cutoff, and inversion_constant request automatic
// choices: the evolution time is scaled so all eigenvalue phases fit the clock
// window (Gershgorin bound), the cutoff defaults to half a clock bin, and the
// inversion constant defaults to the cutoff (the largest valid choice, which
// maximizes success probability).
struct HHLParams {
  int clock_qubits = 6;
  double evolution_time = 0.0;
  double eigenvalue_cutoff = 0.0;
  double inversion_constant = 0.0;
  // 0 runs in exact mode (conditional state computed directly); a positive
  // value simulates that many post-selection attempts and fails if none land.
  std::int64_t shots = 0;
};

// f(x) = x^T A x + b^T x + c with A symmetric.
struct QuadraticForm {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double c = 0.0;
};

struct EigenvalueEstimate {
  double value = 0.0;
  double weight = 0.0;
};

struct HHLResult {
  QuantumState solution_state = QuantumState::zero(1);
  double success_probability = 0.0;
  // Fraction of simulated post-selection attempts that succeeded; equals
  // success_probability in exact mode.
  double estimated_success = 0.0;
  std::vector<EigenvalueEstimate> eigenvalues;
  int clock_qubits = 0;
  double evolution_time = 0.0;
  double eigenvalue_cutoff = 0.0;
  double inversion_constant = 0.0;
  bool signed_window = false;
};

struct QuadraticMinimizeResult {
  QuantumState solution_state = QuantumState::zero(1);
  Eigen::VectorXd minimizer;
  double value = 0.0;
  double success_probability = 0.0;
  // True when b = 0 makes the origin the stationary point; no solve is run.
  bool zero_solution = false;
};

// Returns the system unchanged when A is already Hermitian; otherwise embeds
// it as [[0, A], [A^dagger, 0]] with right-hand side (b, 0).
LinearSystem hermitian_embed(const LinearSystem& sys);

// Textbook quantum phase estimation with the unitary family exp(i A t 2^k).
// The returned register layout is clock (most significant) then input; all
// eigenvalue phases A*t/(2*pi) must lie in [0, 1).
QuantumState phase_estimation(const Eigen::MatrixXcd& a, double time, const QuantumState& input,
                              int clock_qubits, ResourceLedger& ledger);

// Solves A x = b by phase estimation plus conditional eigenvalue-inverse
// rotation. Eigencomponents with |estimate| below the cutoff are filtered
// (pseudo-inverse behavior). The returned state is the normalized
// post-selected solution register.
HHLResult hhl_solve(const LinearSystem& sys, const HHLParams& params, RandomSource& rng,
                    ResourceLedger& ledger);

// Minimizes f(x) = x^T A x + b^T x + c for symmetric positive-definite A by
// solving the stationarity system A x = -b/2 (gradient 2Ax + b = 0). The
// minimizer includes the recovered scale and sign, not just the direction.
QuadraticMinimizeResult quadratic_minimize(const QuadraticForm& form, const HHLParams& params,
                                           RandomSource& rng, ResourceLedger& ledger);

// Solves a possibly rectangular system by Hermitian embedding, returning the
// least-norm solution components. Used by the perceptron trainer.
struct EmbeddedSolveResult {
  HHLResult detail;
  // Normalized solution coordinates (the embedded state restricted to the
  // solution block) and the probability weight that block carried.
  Eigen::VectorXcd solution;
  double solution_weight = 0.0;
};
EmbeddedSolveResult solve_rectangular(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b,
                                      const HHLParams& params, RandomSource& rng,
                                      ResourceLedger& ledger);

// |<a|b>|^2 for unit vectors, used to compare solver output with oracles.
double solution_fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace qmldesk
