#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmldesk/density.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/rng.hpp"

namespace qmldesk {

// Splits a total evolution time into per-copy interaction steps.
struct ExponentiationPlan {
  double t = 1.0;
  int n_copies = 1;

  double dt() const { return t / static_cast<double>(n_copies); }
};

// Top eigenpairs recovered from the eigenvalue register. Eigenvalue estimates
// are descending and lie in [0,1] with sum at most 1; eigenvectors are
// orthonormal. `weights` carries the clock-register probability mass behind
// each retained entry.
struct PrincipalDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Eigen::VectorXcd> eigenvectors;
  std::vector<double> weights;
  int retained_rank = 0;
};

// One infinitesimal-swap interaction with a fresh copy of rho:
// Tr_copy[exp(-iS dt) (rho (x) sigma) exp(iS dt)] for the swap operator S.
DensityMatrix dm_exp_step(const DensityMatrix& rho, const DensityMatrix& sigma, double dt);

// Repeats dm_exp_step n_copies times, approximating conjugation of sigma by
// exp(-i rho t). Also returns the trace distance to the exactly conjugated
// state (dense-oracle comparison), which scales as O(t^2 / n_copies).
struct ExponentiationResult {
  DensityMatrix state = DensityMatrix::maximally_mixed(1);
  double error_estimate = 0.0;
};
ExponentiationResult dm_exponentiate(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const ExponentiationPlan& plan);

// Converts a clock-register outcome back to an eigenvalue estimate for the
// evolution exp(-i rho t): phases wind downward, so outcome k maps to
// 2*pi*((2^c - k) mod 2^c) / (2^c * t).
double decode_eigenvalue_bin(std::uint64_t outcome, int clock_qubits, double time);

// Phase estimation over the copy-driven conditional evolutions, starting the
// data register in rho itself so outcome probabilities track the eigenvalues.
// Runs the full clock (x) data density operator with per-copy interaction
// noise; a non-positive plan time selects the full phase window. Entries with
// probability mass below `threshold` are dropped from the decomposition.
// Clock sizes above 8 are rejected: the conditional-evolution simulation is
// dense in the joint space.
PrincipalDecomposition qpca_extract(const DensityMatrix& rho, const ExponentiationPlan& plan,
                                    int clock_qubits, RandomSource& rng, ResourceLedger& ledger,
                                    double threshold = 0.01);

// Exact outcome distribution of the eigenvalue register (indexed by clock
// value), and a sampled histogram keyed by clock bitstring.
std::vector<double> eigenvalue_register_distribution(const DensityMatrix& rho,
                                                     const ExponentiationPlan& plan,
                                                     int clock_qubits, ResourceLedger& ledger);
std::map<std::string, std::int64_t> sample_eigenvalue_register(const DensityMatrix& rho,
                                                               const ExponentiationPlan& plan,
                                                               int clock_qubits, RandomSource& rng,
                                                               std::int64_t shots,
                                                               ResourceLedger& ledger);

// Operator norm of rho - P rho P with P the projector onto the top-R
// recovered eigenvectors.
double principal_projection_error(const DensityMatrix& rho,
                                  const PrincipalDecomposition& decomposition, int rank);

// Data front end: mean-centers the rows of X and returns X^T X normalized to
// unit trace, zero-padded to a power-of-two dimension.
DensityMatrix covariance_density(const Eigen::MatrixXd& rows);

// 1 / (d * sum of squared eigenvalues): 1 for the maximally mixed spectrum,
// 1/d for a pure state. Values near 1 flag spectra too flat for a small
// retained rank to capture.
double spectrum_flatness(const DensityMatrix& rho);

}  // namespace qmldesk
