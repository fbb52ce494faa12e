// Command-line workbench: dataset ingestion, algorithm dispatch, seeded
// experiment orchestration, and report/plot-data emission.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "qmldesk/boltzmann.hpp"
#include "qmldesk/dataset.hpp"
#include "qmldesk/density.hpp"
#include "qmldesk/distance.hpp"
#include "qmldesk/errors.hpp"
#include "qmldesk/grover.hpp"
#include "qmldesk/hhl.hpp"
#include "qmldesk/io.hpp"
#include "qmldesk/ledger.hpp"
#include "qmldesk/perceptron.hpp"
#include "qmldesk/qpca.hpp"
#include "qmldesk/report.hpp"
#include "qmldesk/rng.hpp"
#include "qmldesk/state.hpp"

namespace {

using nlohmann::json;
using namespace qmldesk;

// Flags shared by every subcommand.
struct CommonOptions {
  std::string dataset;
  std::uint64_t seed = 0;
  std::int64_t shots = 0;
  std::string out;
  std::string format = "json";
};

// Tabular plot data; rendered when --format tsv is selected.
struct TsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunOutput {
  json results;
  TsvData table;
  ResourceLedger ledger;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool dataset_required,
                const std::string& dataset_names = "--dataset,--data") {
  auto* ds = cmd->add_option(dataset_names, opt.dataset, "input CSV path");
  if (dataset_required) ds->required();
  cmd->add_option("--seed", opt.seed, "random seed driving every stream");
  cmd->add_option("--shots", opt.shots, "measurement shots; 0 selects the exact backend")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", opt.out, "output file (default: stdout)");
  cmd->add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"json", "tsv"}));
}

std::string error_kind(const Error& e) {
  if (dynamic_cast<const ZeroVector*>(&e)) return "ZeroVector";
  if (dynamic_cast<const DimensionOverflow*>(&e)) return "DimensionOverflow";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const TargetOutOfRange*>(&e)) return "TargetOutOfRange";
  if (dynamic_cast<const NonUnitaryGate*>(&e)) return "NonUnitaryGate";
  if (dynamic_cast<const EmptyKeepSet*>(&e)) return "EmptyKeepSet";
  if (dynamic_cast<const InvalidState*>(&e)) return "InvalidState";
  if (dynamic_cast<const SingularSystem*>(&e)) return "SingularSystem";
  if (dynamic_cast<const PostSelectionFailed*>(&e)) return "PostSelectionFailed";
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
  if (dynamic_cast<const EigenvalueOutOfRange*>(&e)) return "EigenvalueOutOfRange";
  if (dynamic_cast<const EmptyTrainingSet*>(&e)) return "EmptyTrainingSet";
  if (dynamic_cast<const ZeroTarget*>(&e)) return "ZeroTarget";
  if (dynamic_cast<const SizeCapExceeded*>(&e)) return "SizeCapExceeded";
  if (dynamic_cast<const NoMarkedItems*>(&e)) return "NoMarkedItems";
  if (dynamic_cast<const MeanFieldNonConvergence*>(&e)) return "MeanFieldNonConvergence";
  if (dynamic_cast<const UnknownAlgorithm*>(&e)) return "UnknownAlgorithm";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const InsufficientRuns*>(&e)) return "InsufficientRuns";
  return "Error";
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
}

// Runs a subcommand body, assembles the report, and emits it in the chosen
// format. All randomness flows from the single seed.
void execute(const CommonOptions& opt, json config,
             const std::function<RunOutput(RandomSource&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  RandomSource rng(opt.seed);
  RunOutput out = body(rng);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  RunReport report;
  report.config = std::move(config);
  report.results = std::move(out.results);
  report.ledger = out.ledger;
  report.wall_time_seconds = elapsed.count();

  if (opt.format == "tsv") {
    std::ostringstream tsv;
    write_tsv(tsv, out.table.columns, out.table.rows);
    write_text(opt.out, tsv.str());
  } else {
    write_text(opt.out, report_to_json(report).dump(2) + "\n");
  }
}

json base_config(const std::string& algorithm, const CommonOptions& opt) {
  return json{{"algorithm", algorithm}, {"dataset", opt.dataset},   {"seed", opt.seed},
              {"shots", opt.shots},     {"format", opt.format},     {"out", opt.out}};
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Eigen::VectorXi& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json_real(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i).real());
  return a;
}

json to_json_imag(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i).imag());
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Eigen::VectorXd(m.row(r))));
  return rows;
}

json edges_to_json(const std::vector<WeightedEdge>& edges) {
  json a = json::array();
  for (const WeightedEdge& e : edges)
    a.push_back({{"u", e.u}, {"v", e.v}, {"weight", e.weight}});
  return a;
}

LabeledDataset points_from_matrix(const Eigen::MatrixXd& rows) {
  LabeledDataset points;
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    points.add(rows.row(r).transpose(), 0);
  return points;
}

// ---------------------------------------------------------------------------
// classify: nearest-centroid labels for every query row.

struct ClassifyOptions {
  CommonOptions common;
  std::string query;
};

RunOutput run_classify(const ClassifyOptions& opt, RandomSource& rng) {
  const LabeledCsv data = load_labeled_csv(opt.common.dataset);
  const CentroidModel model = CentroidModel::from_dataset(data.dataset);
  const Eigen::MatrixXd queries = load_matrix_csv(opt.query);

  RunOutput out;
  out.table.columns = {"query_index", "label_id"};
  for (int id : model.class_ids())
    out.table.columns.push_back("distance_" + data.label_names.at(static_cast<std::size_t>(id)));

  json predictions = json::array();
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    RandomSource stream = rng.split(static_cast<std::uint64_t>(i));
    const ClassDistances detail = nearest_centroid_details(queries.row(i).transpose(), model,
                                                           opt.common.shots, stream, out.ledger);
    json entry;
    entry["query_index"] = i;
    entry["label_id"] = detail.label;
    entry["label"] = data.label_names.at(static_cast<std::size_t>(detail.label));
    json distances = json::array();
    std::vector<double> row = {static_cast<double>(i), static_cast<double>(detail.label)};
    for (std::size_t c = 0; c < detail.class_ids.size(); ++c) {
      const DistanceEstimate& est = detail.estimates[c];
      distances.push_back({{"class_id", detail.class_ids[c]},
                           {"class", data.label_names.at(static_cast<std::size_t>(detail.class_ids[c]))},
                           {"distance", est.distance},
                           {"p_hat", est.p_hat},
                           {"standard_error", est.standard_error}});
      row.push_back(est.distance);
    }
    entry["distances"] = distances;
    predictions.push_back(std::move(entry));
    out.table.rows.push_back(std::move(row));
  }
  out.results["predictions"] = std::move(predictions);
  out.results["classes"] = data.label_names;
  out.results["num_queries"] = queries.rows();
  return out;
}

// ---------------------------------------------------------------------------
// binary-classify: two-reference interference classification; the two class
// centroids of the training file serve as the references.

struct BinaryClassifyOptions {
  CommonOptions common;
  std::string query;
  bool adaptive = false;
  std::int64_t batch_shots = 50;
  double z = 3.0;
  int max_rounds = 20;
};

RunOutput run_binary_classify(const BinaryClassifyOptions& opt, RandomSource& rng) {
  const LabeledCsv data = load_labeled_csv(opt.common.dataset);
  if (data.dataset.class_ids().size() != 2)
    throw InvalidState("binary classification needs exactly two classes, got " +
                       std::to_string(data.dataset.class_ids().size()));
  const int id_a = data.dataset.class_ids()[0];
  const int id_b = data.dataset.class_ids()[1];
  const Eigen::VectorXd ref_a = data.dataset.centroid(id_a);
  const Eigen::VectorXd ref_b = data.dataset.centroid(id_b);
  const Eigen::MatrixXd queries = load_matrix_csv(opt.query);

  RunOutput out;
  out.table.columns = {"query_index", "label_id", "distance_a", "distance_b",
                       "pooled_standard_error", "rounds"};
  json predictions = json::array();
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    RandomSource stream = rng.split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd q = queries.row(i).transpose();
    const BinaryClassification result =
        opt.adaptive ? binary_classify_adaptive(q, ref_a, ref_b, opt.batch_shots, opt.z,
                                                opt.max_rounds, stream, out.ledger)
                     : binary_classify(q, ref_a, ref_b, opt.common.shots, stream, out.ledger);
    const int winner = result.label == 0 ? id_a : id_b;
    json entry;
    entry["query_index"] = i;
    entry["label_id"] = winner;
    entry["label"] = data.label_names.at(static_cast<std::size_t>(winner));
    entry["distance_a"] = result.distance_a.distance;
    entry["distance_b"] = result.distance_b.distance;
    entry["pooled_standard_error"] = result.pooled_standard_error;
    entry["rounds"] = result.rounds;
    predictions.push_back(std::move(entry));
    out.table.rows.push_back({static_cast<double>(i), static_cast<double>(winner),
                              result.distance_a.distance, result.distance_b.distance,
                              result.pooled_standard_error, static_cast<double>(result.rounds)});
  }
  out.results["predictions"] = std::move(predictions);
  out.results["reference_a"] = data.label_names.at(static_cast<std::size_t>(id_a));
  out.results["reference_b"] = data.label_names.at(static_cast<std::size_t>(id_b));
  out.results["adaptive"] = opt.adaptive;
  return out;
}

// ---------------------------------------------------------------------------
// knn: k-nearest-neighbour vote via quantum minimum finding.

struct KnnOptions {
  CommonOptions common;
  std::string query;
  int k = 1;
  std::string backend = "exact";
};

RunOutput run_knn(const KnnOptions& opt, RandomSource& rng) {
  const LabeledCsv data = load_labeled_csv(opt.common.dataset);
  const Eigen::MatrixXd queries = load_matrix_csv(opt.query);

  KNNConfig config;
  config.k = opt.k;
  config.shots = opt.common.shots;
  config.backend = opt.backend == "sampled" ? DistanceBackend::sampled : DistanceBackend::exact;

  RunOutput out;
  out.table.columns = {"query_index", "label_id"};
  for (int n = 1; n <= opt.k; ++n) out.table.columns.push_back("neighbor_" + std::to_string(n));

  json predictions = json::array();
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    RandomSource stream = rng.split(static_cast<std::uint64_t>(i));
    const KNNResult result =
        knn_details(queries.row(i).transpose(), data.dataset, config, stream, out.ledger);
    json entry;
    entry["query_index"] = i;
    entry["label_id"] = result.label;
    entry["label"] = data.label_names.at(static_cast<std::size_t>(result.label));
    entry["neighbor_indices"] = result.neighbor_indices;
    json neighbor_labels = json::array();
    for (int label : result.neighbor_labels)
      neighbor_labels.push_back(data.label_names.at(static_cast<std::size_t>(label)));
    entry["neighbor_labels"] = std::move(neighbor_labels);
    entry["budget_exhausted"] = result.budget_exhausted;
    predictions.push_back(std::move(entry));
    std::vector<double> row = {static_cast<double>(i), static_cast<double>(result.label)};
    for (std::size_t n : result.neighbor_indices) row.push_back(static_cast<double>(n));
    out.table.rows.push_back(std::move(row));
  }
  out.results["predictions"] = std::move(predictions);
  out.results["k"] = opt.k;
  out.results["backend"] = opt.backend;
  return out;
}

// ---------------------------------------------------------------------------
// mst-cluster: single-linkage clustering by spanning-tree edge cuts.

struct MstOptions {
  CommonOptions common;
  int k = 2;
  bool with_classical = false;
};

RunOutput run_mst_cluster(const MstOptions& opt, RandomSource& rng) {
  const LabeledDataset points = points_from_matrix(load_matrix_csv(opt.common.dataset));

  RunOutput out;
  const MstClusterResult result = mst_cluster(points, opt.k, rng, out.ledger);
  out.results["assignments"] = result.assignments;
  out.results["tree_edges"] = edges_to_json(result.tree_edges);
  out.results["removed_edges"] = edges_to_json(result.removed_edges);
  out.results["num_points"] = points.size();
  out.results["num_clusters"] = opt.k;
  if (opt.with_classical) {
    ResourceLedger classical_ledger;
    const MstClusterResult classical = mst_cluster_classical(points, opt.k, classical_ledger);
    out.results["classical"] = {{"assignments", classical.assignments},
                                {"oracle_queries", classical_ledger.oracle_queries()}};
  }

  out.table.columns = {"point_index", "cluster"};
  for (std::size_t i = 0; i < result.assignments.size(); ++i)
    out.table.rows.push_back({static_cast<double>(i), static_cast<double>(result.assignments[i])});
  return out;
}

// ---------------------------------------------------------------------------
// hhl-solve: eigenvalue-inversion linear solver on CSV matrix + right-hand
// side. Non-Hermitian or rectangular systems go through the block embedding.

struct HhlOptions {
  CommonOptions common;
  std::string rhs;
  int clock_qubits = 6;
  double time = 0.0;
  double cutoff = 0.0;
  double c_rot = 0.0;
};

RunOutput run_hhl_solve(const HhlOptions& opt, RandomSource& rng) {
  const Eigen::MatrixXd a = load_matrix_csv(opt.common.dataset);
  const Eigen::MatrixXd rhs = load_matrix_csv(opt.rhs);
  Eigen::VectorXd b;
  if (rhs.cols() == 1)
    b = rhs.col(0);
  else if (rhs.rows() == 1)
    b = rhs.row(0).transpose();
  else
    throw ParseError("right-hand side must be a single row or a single column");

  HHLParams params;
  params.clock_qubits = opt.clock_qubits;
  params.evolution_time = opt.time;
  params.eigenvalue_cutoff = opt.cutoff;
  params.inversion_constant = opt.c_rot;
  params.shots = opt.common.shots;

  RunOutput out;
  const EmbeddedSolveResult solved =
      solve_rectangular(a.cast<std::complex<double>>(), b.cast<std::complex<double>>(), params,
                        rng, out.ledger);
  const HHLResult& detail = solved.detail;

  out.results["solution_real"] = to_json_real(solved.solution);
  out.results["solution_imag"] = to_json_imag(solved.solution);
  out.results["solution_weight"] = solved.solution_weight;
  out.results["success_probability"] = detail.success_probability;
  out.results["estimated_success"] = detail.estimated_success;
  // Spectral leakage puts a sliver of weight in every register bin; report
  // only lines that carry measurable mass.
  json eigenvalues = json::array();
  for (const EigenvalueEstimate& est : detail.eigenvalues)
    if (est.weight >= 1e-6)
      eigenvalues.push_back({{"value", est.value}, {"weight", est.weight}});
  out.results["eigenvalues"] = std::move(eigenvalues);
  out.results["clock_qubits"] = detail.clock_qubits;
  out.results["evolution_time"] = detail.evolution_time;
  out.results["eigenvalue_cutoff"] = detail.eigenvalue_cutoff;
  out.results["inversion_constant"] = detail.inversion_constant;
  out.results["signed_window"] = detail.signed_window;

  out.table.columns = {"index", "real", "imag"};
  for (Eigen::Index i = 0; i < solved.solution.size(); ++i)
    out.table.rows.push_back({static_cast<double>(i), solved.solution(i).real(),
                              solved.solution(i).imag()});
  return out;
}

// ---------------------------------------------------------------------------
// train-perceptron: binary weight training through the linear solver. The
// model file keeps the decoded weights plus the full register amplitudes.

struct PerceptronOptions {
  CommonOptions common;
  int clock_qubits = 8;
  std::string mode = "exact";
  double bias = 0.0;
};

RunOutput run_train_perceptron(const PerceptronOptions& opt, RandomSource& rng) {
  const LabeledCsv data = load_labeled_csv(opt.common.dataset);
  PerceptronTrainingSet ts;
  for (std::size_t i = 0; i < data.dataset.size(); ++i) {
    const std::string& name = data.label_names.at(static_cast<std::size_t>(data.dataset.label(i)));
    if (name != "0" && name != "1")
      throw InvalidState("training labels must be 0 or 1, got '" + name + "'");
    ts.add(data.dataset.features(i), name == "1" ? 1 : 0, opt.bias);
  }

  HHLParams params;
  params.clock_qubits = opt.clock_qubits;
  params.shots = opt.common.shots;

  RunOutput out;
  const WeightState weights =
      train_weights(ts, params, rng, out.ledger, opt.mode == "least-squares");

  out.results["decoded_weights"] = to_json(weights.decoded_weights);
  out.results["solution"] = to_json(weights.solution);
  out.results["residual"] = weights.residual;
  out.results["success_probability"] = weights.success_probability;
  out.results["least_squares"] = weights.least_squares;
  out.results["register_qubits"] = weights.register_state.num_qubits();
  out.results["register_real"] = to_json_real(weights.register_state.amplitudes());
  out.results["register_imag"] = to_json_imag(weights.register_state.amplitudes());

  const ActivationRule rule{opt.bias};
  json predictions = json::array();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const int predicted = classify(weights, ts.input(i), rule, out.ledger);
    if (predicted == ts.label(i)) ++correct;
    predictions.push_back(predicted);
  }
  out.results["training_predictions"] = std::move(predictions);
  out.results["training_accuracy"] =
      ts.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(ts.size());

  out.table.columns = {"index", "weight"};
  for (Eigen::Index i = 0; i < weights.decoded_weights.size(); ++i)
    out.table.rows.push_back({static_cast<double>(i),
                              static_cast<double>(weights.decoded_weights(i))});
  return out;
}

// ---------------------------------------------------------------------------
// qpca: principal components of the covariance density of the data rows.
// The default report carries eigenvalues and register statistics only; full
// eigenvectors come out in exact mode behind --vectors.

struct QpcaOptions {
  CommonOptions common;
  double time = 1.0;
  int copies = 128;
  int clock_qubits = 6;
  double threshold = 0.01;
  bool vectors = false;
  std::string scaling_out;
};

RunOutput run_qpca(const QpcaOptions& opt, RandomSource& rng) {
  const Eigen::MatrixXd rows = load_matrix_csv(opt.common.dataset);
  const DensityMatrix rho = covariance_density(rows);
  const ExponentiationPlan plan{opt.time, opt.copies};

  RunOutput out;
  const PrincipalDecomposition decomposition =
      qpca_extract(rho, plan, opt.clock_qubits, rng, out.ledger, opt.threshold);

  out.results["eigenvalues"] = decomposition.eigenvalues;
  out.results["weights"] = decomposition.weights;
  out.results["retained_rank"] = decomposition.retained_rank;
  out.results["spectrum_flatness"] = spectrum_flatness(rho);
  out.results["density_qubits"] = rho.num_qubits();
  out.results["data_columns"] = rows.cols();
  if (opt.vectors) {
    json re = json::array();
    json im = json::array();
    for (const Eigen::VectorXcd& v : decomposition.eigenvectors) {
      re.push_back(to_json_real(v));
      im.push_back(to_json_imag(v));
    }
    out.results["eigenvectors_real"] = std::move(re);
    out.results["eigenvectors_imag"] = std::move(im);
  }
  if (opt.common.shots > 0) {
    RandomSource stream = rng.split(1);
    out.results["register_histogram"] = sample_eigenvalue_register(
        rho, plan, opt.clock_qubits, stream, opt.common.shots, out.ledger);
  }

  out.table.columns = {"rank", "eigenvalue", "weight"};
  for (std::size_t i = 0; i < decomposition.eigenvalues.size(); ++i)
    out.table.rows.push_back({static_cast<double>(i), decomposition.eigenvalues[i],
                              decomposition.weights[i]});

  // Copy-count error sweep for the density exponentiation engine.
  if (!opt.scaling_out.empty()) {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(rho.num_qubits());
    std::vector<std::vector<double>> sweep;
    for (int copies : {16, 32, 64, 128, 256}) {
      const ExponentiationResult step = dm_exponentiate(rho, mixed, {opt.time, copies});
      sweep.push_back({static_cast<double>(copies), step.error_estimate});
    }
    write_tsv_file(opt.scaling_out, {"copies", "error"}, sweep);
  }
  return out;
}

// ---------------------------------------------------------------------------
// train-bm: Boltzmann machine training on binary patterns.

struct TrainBmOptions {
  CommonOptions common;
  int hidden = 2;
  std::string backend = "exact";
  int steps = 500;
  double lr = 0.1;
  std::optional<double> kappa;
};

RunOutput run_train_bm(const TrainBmOptions& opt, RandomSource& rng) {
  const BinaryDataset data = load_binary_csv(opt.common.dataset);
  const int n_visible = data.dimension();
  if (opt.hidden < 1) throw InvalidState("hidden unit count must be at least 1");

  BoltzmannMachine machine;
  machine.visible_bias = Eigen::VectorXd::Zero(n_visible);
  machine.hidden_bias = Eigen::VectorXd::Zero(opt.hidden);
  machine.weights = Eigen::MatrixXd(n_visible, opt.hidden);
  // Small random couplings break the hidden-unit permutation symmetry.
  for (Eigen::Index r = 0; r < machine.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < machine.weights.cols(); ++c)
      machine.weights(r, c) = 0.1 * rng.normal();

  TrainConfig config;
  config.backend =
      opt.backend == "mean-field" ? GradientBackend::mean_field : GradientBackend::exact;
  config.steps = opt.steps;
  config.learning_rate = opt.lr;
  config.kappa = opt.kappa;

  RunOutput out;
  const TrainResult result = train_bm(machine, data, config, out.ledger);

  out.results["initial_log_likelihood"] = result.log_likelihood_trace.front();
  out.results["final_log_likelihood"] = result.log_likelihood_trace.back();
  out.results["log_likelihood_trace"] = result.log_likelihood_trace;
  out.results["visible_bias"] = to_json(result.machine.visible_bias);
  out.results["hidden_bias"] = to_json(result.machine.hidden_bias);
  out.results["weights"] = to_json(result.machine.weights);
  out.results["backend"] = opt.backend;
  out.results["steps"] = opt.steps;
  out.results["num_patterns"] = data.size();

  out.table.columns = {"step", "log_likelihood"};
  for (std::size_t i = 0; i < result.log_likelihood_trace.size(); ++i)
    out.table.rows.push_back({static_cast<double>(i), result.log_likelihood_trace[i]});
  return out;
}

// ---------------------------------------------------------------------------
// bench: seeded parameter sweeps with log-log exponent fits over the ledger.

struct BenchOptions {
  CommonOptions common;
  std::string suite = "shots";
  int repeats = 40;
  int trials = 3;
};

// Distance-estimation shot-noise sweep: p_hat scatter versus shot budget.
RunOutput bench_shots(const BenchOptions& opt, RandomSource& rng) {
  Eigen::VectorXd query = Eigen::VectorXd::Zero(8);
  query(0) = 0.6;
  query(1) = 0.8;
  std::vector<Eigen::VectorXd> reference(2, Eigen::VectorXd::Zero(8));
  reference[0](0) = 1.0;
  reference[1](1) = 1.0;

  const std::vector<std::int64_t> grid = {100, 1000, 10000, 100000};

  struct GridPoint {
    double stddev = 0.0;
    double mean_se = 0.0;
    ResourceLedger ledger;
  };
  // Grid points are independent: each runs on its own split streams.
  std::vector<std::future<GridPoint>> futures;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    futures.push_back(std::async(std::launch::async, [&, g]() {
      GridPoint point;
      std::vector<double> p_hats;
      double se_sum = 0.0;
      for (int r = 0; r < opt.repeats; ++r) {
        RandomSource stream = rng.split(1000 * (g + 1) + static_cast<std::uint64_t>(r));
        const DistanceEstimate est =
            estimate_distance(query, reference, grid[g], stream, point.ledger);
        p_hats.push_back(est.p_hat);
        se_sum += est.standard_error;
      }
      double mean = 0.0;
      for (double p : p_hats) mean += p;
      mean /= static_cast<double>(p_hats.size());
      double var = 0.0;
      for (double p : p_hats) var += (p - mean) * (p - mean);
      var /= static_cast<double>(p_hats.size() - 1);
      point.stddev = std::sqrt(var);
      point.mean_se = se_sum / static_cast<double>(opt.repeats);
      return point;
    }));
  }

  RunOutput out;
  out.table.columns = {"shots", "p_hat_stddev", "mean_standard_error"};
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    GridPoint point = futures[g].get();
    out.ledger.merge(point.ledger);
    out.table.rows.push_back({static_cast<double>(grid[g]), point.stddev, point.mean_se});
    xs.push_back(static_cast<double>(grid[g]));
    ys.push_back(point.stddev);
  }
  const ScalingFit fit = fit_power_law(xs, ys);
  out.results["fit"] = {{"exponent", fit.exponent},
                        {"stderr", fit.stderr_exponent},
                        {"ci_low", fit.ci_low},
                        {"ci_high", fit.ci_high},
                        {"points", fit.points}};
  out.results["repeats"] = opt.repeats;
  json rows = json::array();
  for (const auto& row : out.table.rows)
    rows.push_back({{"shots", row[0]}, {"p_hat_stddev", row[1]}, {"mean_standard_error", row[2]}});
  out.results["rows"] = std::move(rows);
  return out;
}

LabeledDataset gaussian_points(int n, int dims, RandomSource& stream) {
  LabeledDataset points;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dims);
    for (int d = 0; d < dims; ++d) x(d) = stream.normal();
    points.add(x, i % 2);
  }
  return points;
}

// Spanning-tree construction cost versus point count, against the classical
// connection-matrix baseline.
RunOutput bench_mst(const BenchOptions& opt, RandomSource& rng) {
  const std::vector<int> sizes = {8, 16, 32, 64, 128};

  RunOutput out;
  out.table.columns = {"n", "quantum_queries", "classical_queries"};
  std::vector<RunReport> quantum_runs;
  std::vector<RunReport> classical_runs;
  for (int n : sizes) {
    double quantum_total = 0.0;
    double classical_total = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      RandomSource geometry = rng.split(static_cast<std::uint64_t>(100 * n + t));
      const LabeledDataset points = gaussian_points(n, 2, geometry);
      RandomSource stream = rng.split(static_cast<std::uint64_t>(100 * n + t + 50));

      ResourceLedger quantum_ledger;
      mst_cluster(points, 2, stream, quantum_ledger);
      out.ledger.merge(quantum_ledger);
      quantum_total += static_cast<double>(quantum_ledger.oracle_queries());
      RunReport qr;
      qr.config = {{"n", n}};
      qr.ledger = quantum_ledger;
      quantum_runs.push_back(std::move(qr));

      ResourceLedger classical_ledger;
      mst_cluster_classical(points, 2, classical_ledger);
      classical_total += static_cast<double>(classical_ledger.oracle_queries());
      RunReport cr;
      cr.config = {{"n", n}};
      cr.ledger = classical_ledger;
      classical_runs.push_back(std::move(cr));
    }
    out.table.rows.push_back({static_cast<double>(n),
                              quantum_total / static_cast<double>(opt.trials),
                              classical_total / static_cast<double>(opt.trials)});
  }
  out.results["quantum_fit"] = ledger_report(quantum_runs, "n", "oracle_queries");
  out.results["classical_fit"] = ledger_report(classical_runs, "n", "oracle_queries");
  out.results["trials"] = opt.trials;
  json rows = json::array();
  for (const auto& row : out.table.rows)
    rows.push_back({{"n", row[0]}, {"quantum_queries", row[1]}, {"classical_queries", row[2]}});
  out.results["rows"] = std::move(rows);
  return out;
}

// Neighbour-search cost versus training-set size.
RunOutput bench_knn(const BenchOptions& opt, RandomSource& rng) {
  const std::vector<int> sizes = {8, 16, 32, 64, 128};
  KNNConfig config;
  config.k = 3;

  RunOutput out;
  out.table.columns = {"n", "oracle_queries"};
  std::vector<RunReport> runs;
  for (int n : sizes) {
    double total = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      RandomSource geometry = rng.split(static_cast<std::uint64_t>(100 * n + t));
      const LabeledDataset points = gaussian_points(n, 4, geometry);
      const Eigen::VectorXd query = Eigen::VectorXd::Constant(4, 0.5);
      RandomSource stream = rng.split(static_cast<std::uint64_t>(100 * n + t + 50));

      ResourceLedger ledger;
      knn_details(query, points, config, stream, ledger);
      out.ledger.merge(ledger);
      total += static_cast<double>(ledger.oracle_queries());
      RunReport run;
      run.config = {{"n", n}};
      run.ledger = ledger;
      runs.push_back(std::move(run));
    }
    out.table.rows.push_back({static_cast<double>(n), total / static_cast<double>(opt.trials)});
  }
  out.results["fit"] = ledger_report(runs, "n", "oracle_queries");
  out.results["trials"] = opt.trials;
  json rows = json::array();
  for (const auto& row : out.table.rows)
    rows.push_back({{"n", row[0]}, {"oracle_queries", row[1]}});
  out.results["rows"] = std::move(rows);
  return out;
}

RunOutput run_bench(const BenchOptions& opt, RandomSource& rng) {
  if (opt.suite == "shots") return bench_shots(opt, rng);
  if (opt.suite == "mst") return bench_mst(opt, rng);
  if (opt.suite == "knn") return bench_knn(opt, rng);
  throw UnknownAlgorithm("unknown bench suite '" + opt.suite + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale quantum algorithm workbench"};
  app.require_subcommand(1);

  ClassifyOptions classify_opt;
  auto* classify_cmd = app.add_subcommand("classify", "nearest-centroid classification");
  add_common(classify_cmd, classify_opt.common, true);
  classify_cmd->add_option("--query", classify_opt.query, "CSV of query rows")->required();

  BinaryClassifyOptions binary_opt;
  auto* binary_cmd =
      app.add_subcommand("binary-classify", "two-reference interference classification");
  add_common(binary_cmd, binary_opt.common, true);
  binary_cmd->add_option("--query", binary_opt.query, "CSV of query rows")->required();
  binary_cmd->add_flag("--adaptive", binary_opt.adaptive,
                       "grow the shot budget until the distance gap clears the noise");
  binary_cmd->add_option("--batch-shots", binary_opt.batch_shots,
                         "shots added per adaptive round");
  binary_cmd->add_option("--z", binary_opt.z, "significance multiple for the adaptive stop");
  binary_cmd->add_option("--max-rounds", binary_opt.max_rounds, "adaptive round limit");

  KnnOptions knn_opt;
  auto* knn_cmd = app.add_subcommand("knn", "k-nearest-neighbour vote via minimum finding");
  add_common(knn_cmd, knn_opt.common, true);
  knn_cmd->add_option("--query", knn_opt.query, "CSV of query rows")->required();
  knn_cmd->add_option("--k", knn_opt.k, "neighbour count (odd)")->check(CLI::PositiveNumber);
  knn_cmd->add_option("--backend", knn_opt.backend, "distance backend")
      ->check(CLI::IsMember({"exact", "sampled"}));

  MstOptions mst_opt;
  auto* mst_cmd = app.add_subcommand("mst-cluster", "single-linkage spanning-tree clustering");
  add_common(mst_cmd, mst_opt.common, true);
  mst_cmd->add_option("--k", mst_opt.k, "cluster count")->check(CLI::PositiveNumber);
  mst_cmd->add_flag("--with-classical", mst_opt.with_classical,
                    "also run the classical baseline and report its query count");

  HhlOptions hhl_opt;
  auto* hhl_cmd = app.add_subcommand("hhl-solve", "eigenvalue-inversion linear solver");
  add_common(hhl_cmd, hhl_opt.common, true, "--dataset,--data,--matrix");
  hhl_cmd->add_option("--rhs", hhl_opt.rhs, "CSV holding the right-hand side")->required();
  hhl_cmd->add_option("--clock-qubits", hhl_opt.clock_qubits, "phase-estimation register size")
      ->check(CLI::PositiveNumber);
  hhl_cmd->add_option("--time", hhl_opt.time, "evolution time; 0 = automatic window");
  hhl_cmd->add_option("--cutoff", hhl_opt.cutoff, "eigenvalue cutoff; 0 = half clock bin");
  hhl_cmd->add_option("--c-rot", hhl_opt.c_rot, "inversion constant; 0 = cutoff");

  PerceptronOptions perceptron_opt;
  auto* perceptron_cmd =
      app.add_subcommand("train-perceptron", "binary weight training via the linear solver");
  add_common(perceptron_cmd, perceptron_opt.common, true);
  perceptron_cmd->add_option("--clock-qubits", perceptron_opt.clock_qubits,
                             "phase-estimation register size")
      ->check(CLI::PositiveNumber);
  perceptron_cmd->add_option("--mode", perceptron_opt.mode, "training mode")
      ->check(CLI::IsMember({"exact", "least-squares"}));
  perceptron_cmd->add_option("--bias", perceptron_opt.bias, "activation bias for every instance");

  QpcaOptions qpca_opt;
  auto* qpca_cmd = app.add_subcommand("qpca", "principal components of the covariance density");
  add_common(qpca_cmd, qpca_opt.common, true);
  qpca_cmd->add_option("--time", qpca_opt.time, "total evolution time");
  qpca_cmd->add_option("--copies", qpca_opt.copies, "sample copies consumed per evolution")
      ->check(CLI::PositiveNumber);
  qpca_cmd->add_option("--clock-qubits", qpca_opt.clock_qubits, "eigenvalue register size")
      ->check(CLI::PositiveNumber);
  qpca_cmd->add_option("--threshold", qpca_opt.threshold, "minimum retained component weight");
  qpca_cmd->add_flag("--vectors", qpca_opt.vectors,
                     "include full eigenvectors (exact-mode readout)");
  qpca_cmd->add_option("--scaling-out", qpca_opt.scaling_out,
                       "write the copy-count error sweep to this TSV file");

  TrainBmOptions bm_opt;
  double bm_kappa = 0.0;
  auto* bm_cmd = app.add_subcommand("train-bm", "Boltzmann machine training");
  add_common(bm_cmd, bm_opt.common, true);
  bm_cmd->add_option("--hidden", bm_opt.hidden, "hidden unit count")->check(CLI::PositiveNumber);
  bm_cmd->add_option("--backend", bm_opt.backend, "gradient backend")
      ->check(CLI::IsMember({"exact", "mean-field"}));
  bm_cmd->add_option("--steps", bm_opt.steps, "gradient ascent steps")
      ->check(CLI::NonNegativeNumber);
  bm_cmd->add_option("--lr", bm_opt.lr, "learning rate");
  auto* kappa_option =
      bm_cmd->add_option("--kappa", bm_kappa, "condition-number scale for the cost note");

  BenchOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "seeded sweeps with ledger exponent fits");
  add_common(bench_cmd, bench_opt.common, false);
  bench_cmd->add_option("--suite", bench_opt.suite, "sweep to run: shots, mst, or knn");
  bench_cmd->add_option("--repeats", bench_opt.repeats, "repeats per shots grid point")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trials", bench_opt.trials, "trials per size grid point")
      ->check(CLI::PositiveNumber);

  classify_cmd->callback([&]() {
    json config = base_config("classify", classify_opt.common);
    config["query"] = classify_opt.query;
    execute(classify_opt.common, config,
            [&](RandomSource& rng) { return run_classify(classify_opt, rng); });
  });
  binary_cmd->callback([&]() {
    json config = base_config("binary-classify", binary_opt.common);
    config["query"] = binary_opt.query;
    config["adaptive"] = binary_opt.adaptive;
    config["batch_shots"] = binary_opt.batch_shots;
    config["z"] = binary_opt.z;
    config["max_rounds"] = binary_opt.max_rounds;
    execute(binary_opt.common, config,
            [&](RandomSource& rng) { return run_binary_classify(binary_opt, rng); });
  });
  knn_cmd->callback([&]() {
    json config = base_config("knn", knn_opt.common);
    config["query"] = knn_opt.query;
    config["k"] = knn_opt.k;
    config["backend"] = knn_opt.backend;
    execute(knn_opt.common, config, [&](RandomSource& rng) { return run_knn(knn_opt, rng); });
  });
  mst_cmd->callback([&]() {
    json config = base_config("mst-cluster", mst_opt.common);
    config["k"] = mst_opt.k;
    config["with_classical"] = mst_opt.with_classical;
    execute(mst_opt.common, config,
            [&](RandomSource& rng) { return run_mst_cluster(mst_opt, rng); });
  });
  hhl_cmd->callback([&]() {
    json config = base_config("hhl-solve", hhl_opt.common);
    config["rhs"] = hhl_opt.rhs;
    config["clock_qubits"] = hhl_opt.clock_qubits;
    config["time"] = hhl_opt.time;
    config["cutoff"] = hhl_opt.cutoff;
    config["c_rot"] = hhl_opt.c_rot;
    execute(hhl_opt.common, config,
            [&](RandomSource& rng) { return run_hhl_solve(hhl_opt, rng); });
  });
  perceptron_cmd->callback([&]() {
    json config = base_config("train-perceptron", perceptron_opt.common);
    config["clock_qubits"] = perceptron_opt.clock_qubits;
    config["mode"] = perceptron_opt.mode;
    config["bias"] = perceptron_opt.bias;
    execute(perceptron_opt.common, config,
            [&](RandomSource& rng) { return run_train_perceptron(perceptron_opt, rng); });
  });
  qpca_cmd->callback([&]() {
    json config = base_config("qpca", qpca_opt.common);
    config["time"] = qpca_opt.time;
    config["copies"] = qpca_opt.copies;
    config["clock_qubits"] = qpca_opt.clock_qubits;
    config["threshold"] = qpca_opt.threshold;
    config["vectors"] = qpca_opt.vectors;
    config["scaling_out"] = qpca_opt.scaling_out;
    execute(qpca_opt.common, config, [&](RandomSource& rng) { return run_qpca(qpca_opt, rng); });
  });
  bm_cmd->callback([&]() {
    if (kappa_option->count() > 0) bm_opt.kappa = bm_kappa;
    json config = base_config("train-bm", bm_opt.common);
    config["hidden"] = bm_opt.hidden;
    config["backend"] = bm_opt.backend;
    config["steps"] = bm_opt.steps;
    config["lr"] = bm_opt.lr;
    if (bm_opt.kappa) config["kappa"] = *bm_opt.kappa;
    execute(bm_opt.common, config,
            [&](RandomSource& rng) { return run_train_bm(bm_opt, rng); });
  });
  bench_cmd->callback([&]() {
    json config = base_config("bench", bench_opt.common);
    config["suite"] = bench_opt.suite;
    config["repeats"] = bench_opt.repeats;
    config["trials"] = bench_opt.trials;
    execute(bench_opt.common, config,
            [&](RandomSource& rng) { return run_bench(bench_opt, rng); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      // A non-flag first argument that matched no subcommand is a dispatch
      // failure, not a flag-syntax problem.
      const bool unknown_command =
          app.get_subcommands().empty() && argc > 1 && argv[1][0] != '-';
      const json error =
          unknown_command
              ? json{{"error",
                      {{"type", "UnknownAlgorithm"},
                       {"message", std::string("unknown algorithm '") + argv[1] + "'"}}}}
              : json{{"error", {{"type", "ParseError"}, {"message", e.what()}}}};
      std::cout << error.dump(2) << "\n";
      // The JSON object above is the machine-readable error; skip CLI11's
      // duplicate plain-text message.
      return e.get_exit_code();
    }
    return app.exit(e);
  } catch (const Error& e) {
    const json error = {{"error", {{"type", error_kind(e)}, {"message", e.what()}}}};
    std::cout << error.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    const json error = {{"error", {{"type", "Error"}, {"message", e.what()}}}};
    std::cout << error.dump(2) << "\n";
    return 1;
  }
  return 0;
}
