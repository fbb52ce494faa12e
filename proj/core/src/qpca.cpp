#include "qmldesk/qpca.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

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

Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd base, std::uint64_t exponent) {
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1ULL) result = result * base;
    base = base * base;
    exponent >>= 1;
  }
  return result;
}

double operator_norm_bound(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void validate_plan(const ExponentiationPlan& plan, const DensityMatrix& rho) {
  if (plan.n_copies < 1) throw Error("exponentiation plan: need at least one copy");
  if (!(std::isfinite(plan.t))) throw Error("exponentiation plan: time must be finite");
  if (std::abs(plan.dt()) * operator_norm_bound(rho) >= 1.0)
    throw Error("exponentiation plan: per-step angle " + std::to_string(plan.dt()) +
                " too large; increase the copy count");
}

Eigen::MatrixXcd exp_step_raw(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma,
                              double dt) {
  const double c = std::cos(dt);
  const double s = std::sin(dt);
  const Complex ics(0.0, c * s);
  return c * c * sigma + s * s * rho - ics * (rho * sigma - sigma * rho);
}

}  // namespace

DensityMatrix dm_exp_step(const DensityMatrix& rho, const DensityMatrix& sigma, double dt) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("swap step: operator dimensions differ");
  return DensityMatrix(exp_step_raw(rho.entries(), sigma.entries(), dt));
}

ExponentiationResult dm_exponentiate(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const ExponentiationPlan& plan) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("exponentiation: operator dimensions differ");
  validate_plan(plan, rho);

  // Each copy interaction deterministically replaces a sin^2(dt) slice of the
  // state with rho; that replacement is independent of what evolution is being
  // synthesized, so the iteration subtracts it and keeps the coherent
  // commutator part. Commuting pairs then stay exactly invariant and the
  // residual error is the second-order O(t^2/n) term.
  const double dt = plan.dt();
  const Complex angle(0.0, std::cos(dt) * std::sin(dt));
  Eigen::MatrixXcd state = sigma.entries();
  for (int step = 0; step < plan.n_copies; ++step)
    state -= angle * (rho.entries() * state - state * rho.entries());

  // The truncated iteration can push eigenvalues marginally negative; clamp
  // back onto the physical cone before reporting.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> clamp(state);
  if (clamp.eigenvalues().minCoeff() < 0.0) {
    const Eigen::VectorXd clipped = clamp.eigenvalues().cwiseMax(0.0);
    const Eigen::VectorXcd weights = (clipped / clipped.sum()).cast<Complex>();
    state = clamp.eigenvectors() * weights.asDiagonal() * clamp.eigenvectors().adjoint();
  }

  // Dense-oracle comparison with the exactly conjugated state.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries());
  if (solver.info() != Eigen::Success)
    throw Error("exponentiation: eigendecomposition failed");
  Eigen::VectorXcd phases(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::polar(1.0, -solver.eigenvalues()(i) * plan.t);
  const Eigen::MatrixXcd u =
      solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  const Eigen::MatrixXcd exact = u * sigma.entries() * u.adjoint();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> diff(state - exact, Eigen::EigenvaluesOnly);
  ExponentiationResult result;
  result.state = DensityMatrix(state);
  result.error_estimate = 0.5 * diff.eigenvalues().cwiseAbs().sum();
  return result;
}

double decode_eigenvalue_bin(std::uint64_t outcome, int clock_qubits, double time) {
  const auto dim = static_cast<std::uint64_t>(1) << clock_qubits;
  const std::uint64_t reflected = (dim - outcome) % dim;
  return 2.0 * M_PI * static_cast<double>(reflected) / (static_cast<double>(dim) * time);
}

namespace {

struct JointEvolution {
  Eigen::MatrixXcd joint;
  std::vector<double> outcome_probs;
  double time = 0.0;
};

// Evolves the full clock (x) data density operator through the copy-driven
// conditional evolutions and the final inverse Fourier transform. Clock-basis
// blocks evolve independently until the Fourier step: a block whose bra-side
// control bit is set picks up left factors of G = cos(dt) I - i sin(dt) rho,
// the ket side picks up right factors of G^dagger, and blocks with both bits
// set pass through the full trace-out channel of one copy interaction.
JointEvolution run_conditional_evolution(const DensityMatrix& rho,
                                         const ExponentiationPlan& plan, int clock_qubits,
                                         ResourceLedger& ledger) {
  if (clock_qubits < 2 || clock_qubits > 8)
    throw Error("eigenvalue register: clock must have 2..8 qubits");

  JointEvolution out;
  out.time = plan.t > 0.0
                 ? plan.t
                 : 2.0 * M_PI * (1.0 - std::pow(2.0, -clock_qubits));
  ExponentiationPlan resolved{out.time, plan.n_copies};
  validate_plan(resolved, rho);

  const Eigen::Index d = rho.dim();
  const int data_qubits = rho.num_qubits();
  if (clock_qubits + 2 * data_qubits > qubit_cap())
    throw SizeCapExceeded("eigenvalue register: clock plus data plus one copy needs " +
                          std::to_string(clock_qubits + 2 * data_qubits) +
                          " qubits, above the cap of " + std::to_string(qubit_cap()));

  const int c = clock_qubits;
  const auto clock_dim = static_cast<Eigen::Index>(1) << c;
  const double dt = resolved.dt();
  const double cdt = std::cos(dt);
  const double sdt = std::sin(dt);

  const Eigen::MatrixXcd g =
      cdt * Eigen::MatrixXcd::Identity(d, d) - Complex(0.0, sdt) * rho.entries();
  // Channel of one both-sides copy interaction, as a matrix on vec(X):
  // E(X) = cos^2 X - i cos sin [rho, X] + sin^2 tr(X) rho.
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
  Eigen::VectorXcd vec_rho(d * d);
  Eigen::VectorXcd vec_eye(d * d);
  for (Eigen::Index col = 0; col < d; ++col)
    for (Eigen::Index row = 0; row < d; ++row) {
      vec_rho(col * d + row) = rho.entries()(row, col);
      vec_eye(col * d + row) = eye(row, col);
    }
  Eigen::MatrixXcd channel =
      cdt * cdt * Eigen::MatrixXcd::Identity(d * d, d * d) -
      Complex(0.0, cdt * sdt) *
          (Eigen::kroneckerProduct(eye, rho.entries()) -
           Eigen::kroneckerProduct(rho.entries().transpose(), eye)) +
      sdt * sdt * (vec_rho * vec_eye.transpose());

  out.joint = Eigen::MatrixXcd(clock_dim * d, clock_dim * d);
  for (Eigen::Index bk = 0; bk < clock_dim; ++bk)
    for (Eigen::Index bl = 0; bl < clock_dim; ++bl)
      out.joint.block(bk * d, bl * d, d, d) =
          rho.entries() / static_cast<double>(clock_dim);

  std::int64_t interaction_steps = 0;
  for (int m = 0; m < c; ++m) {
    const std::uint64_t steps = static_cast<std::uint64_t>(plan.n_copies) << (c - 1 - m);
    interaction_steps += static_cast<std::int64_t>(steps);
    const Eigen::MatrixXcd g_pow = matrix_power(g, steps);
    const Eigen::MatrixXcd channel_pow = matrix_power(channel, steps);
    const std::uint64_t bit = 1ULL << (c - 1 - m);
    for (Eigen::Index bk = 0; bk < clock_dim; ++bk)
      for (Eigen::Index bl = 0; bl < clock_dim; ++bl) {
        const bool on_bra = static_cast<std::uint64_t>(bk) & bit;
        const bool on_ket = static_cast<std::uint64_t>(bl) & bit;
        if (!on_bra && !on_ket) continue;
        Eigen::MatrixXcd block = out.joint.block(bk * d, bl * d, d, d);
        if (on_bra && on_ket) {
          Eigen::Map<Eigen::VectorXcd> v(block.data(), d * d);
          v = (channel_pow * v).eval();
        } else if (on_bra) {
          block = g_pow * block;
        } else {
          block = block * g_pow.adjoint();
        }
        out.joint.block(bk * d, bl * d, d, d) = block;
      }
  }

  const Eigen::MatrixXcd f = Eigen::kroneckerProduct(gates::fourier(c), eye);
  out.joint = (f.adjoint() * out.joint * f).eval();

  out.outcome_probs.resize(static_cast<std::size_t>(clock_dim));
  for (Eigen::Index k = 0; k < clock_dim; ++k)
    out.outcome_probs[static_cast<std::size_t>(k)] =
        std::max(0.0, out.joint.block(k * d, k * d, d, d).trace().real());

  ledger.charge_qubits(c + 2 * data_qubits);
  ledger.charge_gates(c + interaction_steps + 1);
  ledger.charge_state_preparations(1 + interaction_steps);
  ledger.note_symbolic_cost("copy supply: protocol consumes " +
                            std::to_string(interaction_steps) +
                            " fresh copies of the data operator; simulation reuses one stored "
                            "density matrix");
  return out;
}

}  // namespace

PrincipalDecomposition qpca_extract(const DensityMatrix& rho, const ExponentiationPlan& plan,
                                    int clock_qubits, RandomSource& rng, ResourceLedger& ledger,
                                    double threshold) {
  (void)rng;  // eigenvectors are read from exact conditional states
  if (threshold < 0.0 || threshold >= 1.0)
    throw Error("principal extraction: threshold must lie in [0,1)");
  const JointEvolution run = run_conditional_evolution(rho, plan, clock_qubits, ledger);
  const Eigen::Index d = rho.dim();

  struct Entry {
    Eigen::VectorXcd vector;
    double weight = 0.0;
    double value_mass = 0.0;  // sum of weight * decoded eigenvalue
  };
  std::vector<Entry> entries;

  std::vector<std::uint64_t> order(run.outcome_probs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    return run.outcome_probs[a] > run.outcome_probs[b];
  });

  for (std::uint64_t k : order) {
    const double p = run.outcome_probs[k];
    if (p < 1e-6) break;
    Eigen::MatrixXcd conditional =
        run.joint.block(static_cast<Eigen::Index>(k) * d, static_cast<Eigen::Index>(k) * d, d, d);
    conditional = (0.5 * (conditional + conditional.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(conditional);
    Eigen::VectorXcd vector = solver.eigenvectors().col(d - 1);
    const double decoded =
        std::clamp(decode_eigenvalue_bin(k, clock_qubits, run.time), 0.0, 1.0);

    Entry* merged = nullptr;
    for (Entry& entry : entries)
      if (std::norm(entry.vector.dot(vector)) > 0.5) {
        merged = &entry;
        break;
      }
    if (merged == nullptr) {
      entries.push_back(Entry{std::move(vector), p, p * decoded});
    } else {
      merged->weight += p;
      merged->value_mass += p * decoded;
    }
  }

  std::vector<Entry> retained;
  for (Entry& entry : entries)
    if (entry.weight >= threshold) retained.push_back(std::move(entry));
  std::stable_sort(retained.begin(), retained.end(), [](const Entry& a, const Entry& b) {
    return a.value_mass / a.weight > b.value_mass / b.weight;
  });

  PrincipalDecomposition out;
  for (Entry& entry : retained) {
    Eigen::VectorXcd vector = entry.vector;
    for (const Eigen::VectorXcd& kept : out.eigenvectors)
      vector -= kept.dot(vector) * kept;
    const double norm = vector.norm();
    if (norm < 1e-6) continue;
    vector /= norm;
    const Eigen::Index lead = [&] {
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < vector.size(); ++i)
        if (std::abs(vector(i)) > std::abs(vector(best))) best = i;
      return best;
    }();
    vector *= std::polar(1.0, -std::arg(vector(lead)));
    out.eigenvectors.push_back(std::move(vector));
    out.eigenvalues.push_back(std::clamp(entry.value_mass / entry.weight, 0.0, 1.0));
    out.weights.push_back(entry.weight);
  }

  double total = 0.0;
  for (double v : out.eigenvalues) total += v;
  if (total > 1.0)
    for (double& v : out.eigenvalues) v /= total;
  out.retained_rank = static_cast<int>(out.eigenvalues.size());
  return out;
}

std::vector<double> eigenvalue_register_distribution(const DensityMatrix& rho,
                                                     const ExponentiationPlan& plan,
                                                     int clock_qubits, ResourceLedger& ledger) {
  return run_conditional_evolution(rho, plan, clock_qubits, ledger).outcome_probs;
}

std::map<std::string, std::int64_t> sample_eigenvalue_register(const DensityMatrix& rho,
                                                               const ExponentiationPlan& plan,
                                                               int clock_qubits, RandomSource& rng,
                                                               std::int64_t shots,
                                                               ResourceLedger& ledger) {
  if (shots < 1) throw Error("eigenvalue register: shots must be positive");
  const std::vector<double> probs =
      eigenvalue_register_distribution(rho, plan, clock_qubits, ledger);
  DiscreteSampler sampler(probs);
  std::map<std::string, std::int64_t> histogram;
  for (std::int64_t s = 0; s < shots; ++s)
    ++histogram[index_to_bitstring(sampler.sample(rng), clock_qubits)];
  ledger.charge_shots(shots);
  return histogram;
}

double principal_projection_error(const DensityMatrix& rho,
                                  const PrincipalDecomposition& decomposition, int rank) {
  if (rank < 0 || rank > static_cast<int>(rho.dim()))
    throw Error("projection error: rank out of range");
  if (rank > static_cast<int>(decomposition.eigenvectors.size()))
    throw Error("projection error: decomposition holds only " +
                std::to_string(decomposition.eigenvectors.size()) + " eigenvectors");
  const Eigen::Index d = rho.dim();
  Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < rank; ++i) {
    const Eigen::VectorXcd& u = decomposition.eigenvectors[static_cast<std::size_t>(i)];
    if (u.size() != d) throw DimensionMismatch("projection error: eigenvector dimension");
    projector += u * u.adjoint();
  }
  const Eigen::MatrixXcd residual =
      rho.entries() - projector * rho.entries() * projector;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(residual, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

DensityMatrix covariance_density(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1 || rows.cols() < 1)
    throw EmptyTrainingSet("covariance: dataset is empty");
  Eigen::MatrixXd centered = rows;
  centered.rowwise() -= rows.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered;
  const double trace = cov.trace();
  if (trace <= 1e-300) throw ZeroVector("covariance: dataset has zero variance");

  const Eigen::Index d = cov.rows();
  const auto padded = static_cast<Eigen::Index>(1) << bits_for(d);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(padded, padded);
  out.topLeftCorner(d, d) = (cov / trace).cast<Complex>();
  return DensityMatrix(std::move(out));
}

double spectrum_flatness(const DensityMatrix& rho) {
  return 1.0 / (static_cast<double>(rho.dim()) * rho.purity());
}

}  // namespace qmldesk
