#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qmldesk/density.hpp"
#include "qmldesk/errors.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/qpca.hpp"
#include "qmldesk/rng.hpp"
#include "qmldesk/state.hpp"
#include "support/oracles.hpp"

using namespace qmldesk;

namespace {

DensityMatrix random_density(int dim, RandomSource& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(rng.normal(), rng.normal());
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix{rho};
}

// Exact conjugated state e^{-i rho t} sigma e^{+i rho t}.
Eigen::MatrixXcd exact_conjugation(const DensityMatrix& rho, const DensityMatrix& sigma,
                                   double t) {
  const Eigen::MatrixXcd u = oracles::evolution_operator(rho.entries(), t);
  return u * sigma.entries() * u.adjoint();
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST_CASE("a single interaction step fixes commuting states and tracks the commutator") {
  const DensityMatrix pure = DensityMatrix::from_state(QuantumState::zero(1));
  const DensityMatrix fixed = dm_exp_step(pure, pure, 0.3);
  CHECK((fixed.entries() - pure.entries()).cwiseAbs().maxCoeff() < 1e-12);

  RandomSource rng(51);
  const DensityMatrix rho = random_density(2, rng);
  const DensityMatrix sigma = random_density(2, rng);
  const DensityMatrix still = dm_exp_step(rho, sigma, 0.0);
  CHECK((still.entries() - sigma.entries()).cwiseAbs().maxCoeff() < 1e-14);

  // First-order expansion: step(sigma) = sigma - i dt [rho, sigma] + O(dt^2).
  auto residual = [&](double dt) {
    const Eigen::MatrixXcd commutator =
        rho.entries() * sigma.entries() - sigma.entries() * rho.entries();
    const Eigen::MatrixXcd first_order =
        sigma.entries() - Complex(0.0, dt) * commutator;
    return (dm_exp_step(rho, sigma, dt).entries() - first_order).cwiseAbs().maxCoeff();
  };
  const double coarse = residual(0.1);
  const double fine = residual(0.05);
  CHECK(coarse / fine > 3.2);
  CHECK(coarse / fine < 4.8);

  CHECK_THROWS_AS(dm_exp_step(random_density(4, rng), sigma, 0.1), DimensionMismatch);
}

TEST_CASE("iterated steps approximate the density-driven evolution") {
  RandomSource rng(52);
  const DensityMatrix rho = random_density(4, rng);
  const DensityMatrix sigma = random_density(4, rng);

  // t = 0 and commuting pairs are exact.
  const ExponentiationResult none = dm_exponentiate(rho, sigma, {0.0, 8});
  CHECK((none.state.entries() - sigma.entries()).cwiseAbs().maxCoeff() < 1e-12);

  const DensityMatrix diag_rho{
      Eigen::Vector4d(0.4, 0.3, 0.2, 0.1).asDiagonal().toDenseMatrix().cast<Complex>()};
  const DensityMatrix diag_sigma{
      Eigen::Vector4d(0.1, 0.2, 0.3, 0.4).asDiagonal().toDenseMatrix().cast<Complex>()};
  const ExponentiationResult commuting = dm_exponentiate(diag_rho, diag_sigma, {1.7, 16});
  CHECK((commuting.state.entries() - diag_sigma.entries()).cwiseAbs().maxCoeff() < 1e-10);

  // Error roughly halves when the copy count doubles.
  const ExponentiationResult at64 = dm_exponentiate(rho, sigma, {1.0, 64});
  const ExponentiationResult at128 = dm_exponentiate(rho, sigma, {1.0, 128});
  const double ratio = at64.error_estimate / at128.error_estimate;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);

  // The reported error estimate is the real trace distance to the oracle.
  const Eigen::MatrixXcd exact = exact_conjugation(rho, sigma, 1.0);
  CHECK(std::abs(at128.error_estimate - trace_distance(at128.state.entries(), exact)) < 1e-12);

  // Physicality of the iterated output.
  CHECK(std::abs(at128.state.entries().trace().real() - 1.0) < 1e-10);
  CHECK((at128.state.entries() - at128.state.entries().adjoint()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("oversized interaction steps are rejected up front") {
  RandomSource rng(53);
  const DensityMatrix rho = random_density(2, rng);
  const DensityMatrix sigma = random_density(2, rng);
  CHECK_THROWS_AS(dm_exponentiate(rho, sigma, {50.0, 4}), Error);
}

TEST_CASE("clock outcomes decode through the downward phase winding") {
  const double t = M_PI / 2.0;
  CHECK(decode_eigenvalue_bin(0, 4, t) == 0.0);
  CHECK(std::abs(decode_eigenvalue_bin(13, 4, t) - 0.75) < 1e-12);
  CHECK(std::abs(decode_eigenvalue_bin(15, 4, t) - 0.25) < 1e-12);
}

TEST_CASE("a pure state extracts as a single unit eigenvalue") {
  RandomSource rng(54);
  ResourceLedger ledger;
  const DensityMatrix rho = DensityMatrix::from_state(QuantumState::zero(1));
  const PrincipalDecomposition dec = qpca_extract(rho, {0.0, 256}, 5, rng, ledger);
  REQUIRE(dec.retained_rank == 1);
  CHECK(std::abs(dec.eigenvalues[0] - 1.0) < 0.05);
  CHECK(std::abs(std::abs(dec.eigenvectors[0](0)) - 1.0) < 1e-6);
}

TEST_CASE("the symmetric two-level density resolves both eigenpairs") {
  RandomSource rng(55);
  ResourceLedger ledger;
  Eigen::MatrixXcd entries(2, 2);
  entries << 0.5, 0.25, 0.25, 0.5;
  const DensityMatrix rho{entries};

  const PrincipalDecomposition dec = qpca_extract(rho, {0.0, 512}, 6, rng, ledger);
  REQUIRE(dec.retained_rank == 2);
  CHECK(std::abs(dec.eigenvalues[0] - 0.75) < 0.05);
  CHECK(std::abs(dec.eigenvalues[1] - 0.25) < 0.05);

  const double inv = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd plus(2);
  plus << inv, inv;
  Eigen::VectorXcd minus(2);
  minus << inv, -inv;
  CHECK(std::abs(std::abs(dec.eigenvectors[0].dot(plus)) - 1.0) < 1e-6);
  CHECK(std::abs(std::abs(dec.eigenvectors[1].dot(minus)) - 1.0) < 1e-6);

  // Orthonormality and the probability-mass weights.
  CHECK(std::abs(dec.eigenvectors[0].norm() - 1.0) < 1e-8);
  CHECK(std::abs(dec.eigenvectors[0].dot(dec.eigenvectors[1])) < 1e-8);
  CHECK(dec.weights[0] > dec.weights[1]);
}

TEST_CASE("rank-two spectra land within the clock resolution bound") {
  RandomSource rng(56);
  ResourceLedger ledger;
  // Two random orthonormal vectors in dim 8 with weights 0.8 / 0.2.
  Eigen::MatrixXcd g(8, 2);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 2; ++c) g(r, c) = Complex(rng.normal(), rng.normal());
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(8, 2);
  const Eigen::MatrixXcd rho =
      0.8 * q.col(0) * q.col(0).adjoint() + 0.2 * q.col(1) * q.col(1).adjoint();

  for (const int clock : {4, 6}) {
    const PrincipalDecomposition dec =
        qpca_extract(DensityMatrix{rho}, {0.0, 256}, clock, rng, ledger);
    REQUIRE(dec.retained_rank >= 1);
    const double bound = std::pow(2.0, -(clock - 1));
    CHECK(std::abs(dec.eigenvalues[0] - 0.8) < bound);
    CHECK(std::abs(std::abs(dec.eigenvectors[0].dot(q.col(0))) - 1.0) < 1e-3);
  }
}

TEST_CASE("register sampling frequencies track the spectrum") {
  RandomSource rng(57);
  ResourceLedger ledger;
  Eigen::MatrixXcd entries(2, 2);
  entries << 0.5, 0.25, 0.25, 0.5;
  const DensityMatrix rho{entries};

  // t = pi/2 at four clock bits puts both eigenphases on exact bins.
  const ExponentiationPlan plan{M_PI / 2.0, 2048};
  const std::vector<double> distribution = eigenvalue_register_distribution(rho, plan, 4, ledger);
  double total = 0.0;
  for (double p : distribution) total += p;
  CHECK(std::abs(total - 1.0) < 1e-9);

  const std::int64_t shots = 100000;
  const auto histogram = sample_eigenvalue_register(rho, plan, 4, rng, shots, ledger);
  double near_major = 0.0;
  for (const auto& [bits, count] : histogram) {
    std::uint64_t index = 0;
    for (char c : bits) index = index * 2 + (c == '1');
    const double decoded = decode_eigenvalue_bin(index, 4, plan.t);
    if (std::abs(decoded - 0.75) < std::abs(decoded - 0.25))
      near_major += static_cast<double>(count);
  }
  // Five binomial sigmas at p = 0.75.
  const double sigma = std::sqrt(0.75 * 0.25 / static_cast<double>(shots));
  CHECK(std::abs(near_major / static_cast<double>(shots) - 0.75) < 5.0 * sigma);
  CHECK(ledger.shots() >= shots);
}

TEST_CASE("projection error reports the discarded spectral mass") {
  RandomSource rng(58);
  ResourceLedger ledger;
  const DensityMatrix rho{
      Eigen::Vector4d(0.7, 0.2, 0.1, 0.0).asDiagonal().toDenseMatrix().cast<Complex>()};
  const PrincipalDecomposition dec = qpca_extract(rho, {0.0, 256}, 6, rng, ledger, 0.01);

  CHECK(principal_projection_error(rho, dec, 0) == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(principal_projection_error(rho, dec, 1) == doctest::Approx(0.2).epsilon(1e-3));
  const int full = static_cast<int>(dec.eigenvectors.size());
  CHECK(principal_projection_error(rho, dec, full) < 0.11);
}

TEST_CASE("clock register bounds and qubit budget are enforced") {
  RandomSource rng(59);
  ResourceLedger ledger;
  const DensityMatrix rho = random_density(2, rng);
  CHECK_THROWS_AS(qpca_extract(rho, {1.0, 64}, 1, rng, ledger), Error);
  CHECK_THROWS_AS(qpca_extract(rho, {1.0, 64}, 9, rng, ledger), Error);

  setenv("QMLDESK_QUBIT_CAP", "6", 1);
  CHECK_THROWS_AS(qpca_extract(random_density(4, rng), {1.0, 64}, 4, rng, ledger),
                  SizeCapExceeded);
  unsetenv("QMLDESK_QUBIT_CAP");
}

TEST_CASE("dataset rows become a centered covariance density") {
  Eigen::MatrixXd rows(4, 2);
  rows << 1.0, 0.0, -1.0, 0.0, 2.0, 0.0, -2.0, 0.0;
  const DensityMatrix rho = covariance_density(rows);
  CHECK(rho.dim() == 2);
  CHECK(std::abs(rho.entries()(0, 0).real() - 1.0) < 1e-12);
  CHECK(std::abs(rho.entries()(1, 1)) < 1e-12);

  // Padding to the next power of two.
  Eigen::MatrixXd three(3, 3);
  three << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  CHECK(covariance_density(three).dim() == 4);

  Eigen::MatrixXd constant(3, 2);
  constant << 1, 1, 1, 1, 1, 1;
  CHECK_THROWS_AS(covariance_density(constant), ZeroVector);
  CHECK_THROWS_AS(covariance_density(Eigen::MatrixXd(0, 2)), EmptyTrainingSet);
}

TEST_CASE("spectrum flatness separates flat from concentrated spectra") {
  CHECK(std::abs(spectrum_flatness(DensityMatrix::maximally_mixed(2)) - 1.0) < 1e-12);
  const DensityMatrix pure = DensityMatrix::from_state(QuantumState::zero(2));
  CHECK(std::abs(spectrum_flatness(pure) - 0.25) < 1e-12);
}
