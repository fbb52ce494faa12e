#include "qmldesk/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmldesk/errors.hpp"

namespace qmldesk {

namespace {

int bits_for(std::uint64_t count) {
  int bits = 1;
  while ((1ULL << bits) < count) ++bits;
  return bits;
}

double projection_probability(const ClassStates& states) {
  const std::uint64_t data_dim = states.psi.dim() / states.phi.dim();
  const std::uint64_t index_dim = states.phi.dim();
  double p = 0.0;
  for (std::uint64_t data = 0; data < data_dim; ++data) {
    Complex acc = 0.0;
    for (std::uint64_t j = 0; j < index_dim; ++j)
      acc += std::conj(states.phi.amplitude(j)) * states.psi.amplitude(j * data_dim + data);
    p += std::norm(acc);
  }
  return p;
}

}  // namespace

ClassStates build_class_states(const Eigen::VectorXd& query,
                               const std::vector<Eigen::VectorXd>& class_vectors,
                               ResourceLedger& ledger) {
  if (class_vectors.empty())
    throw EmptyTrainingSet("class states: class has no reference vectors");
  const Eigen::Index d = query.size();
  if (d == 0) throw ZeroVector("class states: empty query");
  for (const auto& v : class_vectors)
    if (v.size() != d)
      throw DimensionMismatch("class states: reference dimension " + std::to_string(v.size()) +
                              " does not match query dimension " + std::to_string(d));
  const double u_norm = query.norm();
  if (u_norm == 0.0) throw ZeroVector("class states: zero query vector");
  const auto n = static_cast<double>(class_vectors.size());

  const int data_qubits = bits_for(static_cast<std::uint64_t>(d));
  const int index_qubits = bits_for(class_vectors.size() + 1);
  const Eigen::Index data_dim = static_cast<Eigen::Index>(1) << data_qubits;
  const Eigen::Index index_dim = static_cast<Eigen::Index>(1) << index_qubits;

  double z = u_norm * u_norm;
  for (const auto& v : class_vectors) z += v.squaredNorm() / n;

  Eigen::VectorXd psi_raw = Eigen::VectorXd::Zero(index_dim * data_dim);
  Eigen::VectorXd phi_raw = Eigen::VectorXd::Zero(index_dim);
  psi_raw.segment(0, d) = query / (u_norm * std::sqrt(2.0));
  phi_raw(0) = u_norm;
  for (std::size_t j = 0; j < class_vectors.size(); ++j) {
    const double v_norm = class_vectors[j].norm();
    if (v_norm == 0.0) throw ZeroVector("class states: zero reference vector");
    psi_raw.segment(static_cast<Eigen::Index>(j + 1) * data_dim, d) =
        class_vectors[j] / (v_norm * std::sqrt(2.0 * n));
    phi_raw(static_cast<Eigen::Index>(j + 1)) = -v_norm / std::sqrt(n);
  }

  return ClassStates{prepare_amplitude_state(psi_raw, ledger),
                     prepare_amplitude_state(phi_raw, ledger), z};
}

DistanceEstimate estimate_distance(const Eigen::VectorXd& query,
                                   const std::vector<Eigen::VectorXd>& class_vectors,
                                   std::int64_t shots, RandomSource& rng,
                                   ResourceLedger& ledger) {
  if (shots < 0) throw Error("distance estimate: negative shot count");
  const ClassStates states = build_class_states(query, class_vectors, ledger);
  const double p = projection_probability(states);

  DistanceEstimate est;
  if (shots == 0) {
    est.p_hat = p;
    est.distance = std::sqrt(2.0 * p * states.z);
    return est;
  }

  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < shots; ++s)
    if (rng.bernoulli(p)) ++hits;
  ledger.charge_shots(shots);

  est.shots = shots;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(shots);
  est.distance = std::sqrt(2.0 * est.p_hat * states.z);
  const double root_z = std::sqrt(2.0 * states.z);
  const double n_shots = static_cast<double>(shots);
  if (est.p_hat > 0.0) {
    est.standard_error = root_z * std::sqrt(est.p_hat * (1.0 - est.p_hat) / n_shots) /
                         (2.0 * std::sqrt(est.p_hat));
  } else {
    est.standard_error = root_z / (2.0 * std::sqrt(n_shots));
  }
  return est;
}

CentroidModel CentroidModel::from_dataset(const LabeledDataset& dataset) {
  if (dataset.empty()) throw EmptyTrainingSet("centroid model: dataset is empty");
  CentroidModel model;
  for (int id : dataset.class_ids()) {
    std::vector<Eigen::VectorXd> vectors;
    for (std::size_t i : dataset.indices_of_class(id)) vectors.push_back(dataset.features(i));
    model.add_class(id, std::move(vectors));
  }
  return model;
}

void CentroidModel::add_class(int class_id, std::vector<Eigen::VectorXd> vectors) {
  if (vectors.empty()) throw EmptyTrainingSet("centroid model: class has no vectors");
  const auto pos = std::lower_bound(class_ids_.begin(), class_ids_.end(), class_id);
  if (pos != class_ids_.end() && *pos == class_id)
    throw Error("centroid model: class " + std::to_string(class_id) + " added twice");
  const auto offset = pos - class_ids_.begin();
  class_ids_.insert(pos, class_id);
  vectors_.insert(vectors_.begin() + offset, std::move(vectors));
}

const std::vector<Eigen::VectorXd>& CentroidModel::class_vectors(int class_id) const {
  const auto pos = std::lower_bound(class_ids_.begin(), class_ids_.end(), class_id);
  if (pos == class_ids_.end() || *pos != class_id)
    throw Error("centroid model: unknown class " + std::to_string(class_id));
  return vectors_[static_cast<std::size_t>(pos - class_ids_.begin())];
}

ClassDistances nearest_centroid_details(const Eigen::VectorXd& query, const CentroidModel& model,
                                        std::int64_t shots, RandomSource& rng,
                                        ResourceLedger& ledger) {
  if (model.num_classes() < 2)
    throw EmptyTrainingSet("nearest centroid: need at least two classes");

  ClassDistances result;
  result.class_ids = model.class_ids();
  for (std::size_t c = 0; c < result.class_ids.size(); ++c) {
    RandomSource stream = rng.split(static_cast<std::uint64_t>(c));
    result.estimates.push_back(estimate_distance(query, model.class_vectors(result.class_ids[c]),
                                                 shots, stream, ledger));
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < result.estimates.size(); ++c)
    if (result.estimates[c].distance < result.estimates[best].distance) best = c;
  result.label = result.class_ids[best];
  return result;
}

int nearest_centroid_classify(const Eigen::VectorXd& query, const CentroidModel& model,
                              std::int64_t shots, RandomSource& rng, ResourceLedger& ledger) {
  return nearest_centroid_details(query, model, shots, rng, ledger).label;
}

namespace {

constexpr Eigen::Index kBinaryDims = 8;

Eigen::VectorXd pad_to_binary_dims(const Eigen::VectorXd& v) {
  if (v.size() >= kBinaryDims) return v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kBinaryDims);
  out.head(v.size()) = v;
  return out;
}

double pooled_se(const DistanceEstimate& a, const DistanceEstimate& b) {
  return std::sqrt(a.standard_error * a.standard_error + b.standard_error * b.standard_error);
}

}  // namespace

BinaryClassification binary_classify(const Eigen::VectorXd& query, const Eigen::VectorXd& ref_a,
                                     const Eigen::VectorXd& ref_b, std::int64_t shots,
                                     RandomSource& rng, ResourceLedger& ledger) {
  const Eigen::VectorXd u = pad_to_binary_dims(query);
  const Eigen::VectorXd va = pad_to_binary_dims(ref_a);
  const Eigen::VectorXd vb = pad_to_binary_dims(ref_b);

  BinaryClassification out;
  RandomSource stream_a = rng.split(0);
  RandomSource stream_b = rng.split(1);
  out.distance_a = estimate_distance(u, {va}, shots, stream_a, ledger);
  out.distance_b = estimate_distance(u, {vb}, shots, stream_b, ledger);
  out.pooled_standard_error = pooled_se(out.distance_a, out.distance_b);
  out.label = out.distance_b.distance < out.distance_a.distance ? 1 : 0;
  return out;
}

BinaryClassification binary_classify_adaptive(const Eigen::VectorXd& query,
                                              const Eigen::VectorXd& ref_a,
                                              const Eigen::VectorXd& ref_b,
                                              std::int64_t batch_shots, double z, int max_rounds,
                                              RandomSource& rng, ResourceLedger& ledger) {
  if (batch_shots < 1) throw Error("adaptive classification: batch shots must be positive");
  if (max_rounds < 1) throw Error("adaptive classification: need at least one round");
  const Eigen::VectorXd u = pad_to_binary_dims(query);
  const Eigen::VectorXd va = pad_to_binary_dims(ref_a);
  const Eigen::VectorXd vb = pad_to_binary_dims(ref_b);

  RandomSource stream_a = rng.split(0);
  RandomSource stream_b = rng.split(1);
  double za = 0.0;
  double zb = 0.0;
  {
    ResourceLedger scratch;
    za = build_class_states(u, {va}, scratch).z;
    zb = build_class_states(u, {vb}, scratch).z;
  }
  std::int64_t hits_a = 0;
  std::int64_t hits_b = 0;
  BinaryClassification out;
  for (int round = 1; round <= max_rounds; ++round) {
    const DistanceEstimate ea = estimate_distance(u, {va}, batch_shots, stream_a, ledger);
    const DistanceEstimate eb = estimate_distance(u, {vb}, batch_shots, stream_b, ledger);
    // Recover this batch's hit counts and accumulate.
    hits_a += std::llround(ea.p_hat * static_cast<double>(batch_shots));
    hits_b += std::llround(eb.p_hat * static_cast<double>(batch_shots));
    const auto total = static_cast<double>(batch_shots) * round;
    auto combine = [&](std::int64_t hits, double z_val) {
      DistanceEstimate est;
      est.shots = batch_shots * round;
      est.p_hat = static_cast<double>(hits) / total;
      est.distance = std::sqrt(2.0 * est.p_hat * z_val);
      const double root_z = std::sqrt(2.0 * z_val);
      est.standard_error =
          est.p_hat > 0.0
              ? root_z * std::sqrt(est.p_hat * (1.0 - est.p_hat) / total) / (2.0 * std::sqrt(est.p_hat))
              : root_z / (2.0 * std::sqrt(total));
      return est;
    };
    out.distance_a = combine(hits_a, za);
    out.distance_b = combine(hits_b, zb);
    out.pooled_standard_error = pooled_se(out.distance_a, out.distance_b);
    out.rounds = round;
    if (std::abs(out.distance_a.distance - out.distance_b.distance) >
        z * out.pooled_standard_error)
      break;
  }
  out.label = out.distance_b.distance < out.distance_a.distance ? 1 : 0;
  return out;
}

}  // namespace qmldesk
