// Command-line front end: wires ingestion -> preprocessing -> similarity ->
// QUBO -> solve -> analysis and emits JSON reports. Exit codes: 0 success,
// 1 computation error, 2 usage or I/O error; failures print an error JSON.
#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qclust/analysis.hpp"
#include "qclust/annealer.hpp"
#include "qclust/dataset.hpp"
#include "qclust/error.hpp"
#include "qclust/kmeans.hpp"
#include "qclust/lowrank.hpp"
#include "qclust/pipeline.hpp"
#include "qclust/qubo.hpp"
#include "qclust/similarity.hpp"
#include "qclust/synth.hpp"

namespace {

using nlohmann::json;

std::string iso_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw qclust::IoError("cannot write '" + out_path + "'");
  f << j.dump(2) << "\n";
  if (!f) throw qclust::IoError("write failed for '" + out_path + "'");
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream f(path);
  if (!f) throw qclust::IoError("cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << m(i, j);
    }
    f << '\n';
  }
  if (!f) throw qclust::IoError("write failed for '" + path + "'");
}

// Input options shared by every dataset-consuming subcommand.
struct InputOpts {
  std::string path;
  bool labels = true;  // CSV only: first column holds integer class labels
  bool skip_header = false;
  std::vector<int> roi;  // x0,y0,x1,y1 when non-empty
};

void add_input_opts(CLI::App* sub, InputOpts& in) {
  sub->add_option("input", in.path, "Dataset: CSV series or FSK1 frame stack")
      ->required();
  sub->add_flag("--labels,!--no-labels", in.labels,
                "CSV first column holds integer class labels (default: on)");
  sub->add_flag("--skip-header", in.skip_header, "Skip the first CSV line");
  sub->add_option("--roi", in.roi,
                  "Frame crop x0,y0,x1,y1 (half-open pixel rectangle)")
      ->delimiter(',')
      ->expected(4);
}

qclust::Dataset load_input(const InputOpts& in) {
  std::ifstream probe(in.path, std::ios::binary);
  if (!probe) throw qclust::IoError("cannot open '" + in.path + "'");
  char magic[4] = {};
  probe.read(magic, 4);
  probe.close();
  qclust::Dataset d = std::memcmp(magic, "FSK1", 4) == 0
                          ? qclust::load_frames(in.path)
                          : qclust::load_csv(in.path, in.labels, in.skip_header);
  if (!in.roi.empty()) {
    if (!d.frame_shape)
      throw qclust::FormatError("--roi requires a frame dataset");
    d = qclust::crop_roi(d, in.roi[0], in.roi[1], in.roi[2], in.roi[3]);
  }
  return d;
}

// Pipeline options shared by cluster / baseline / qubo-export / mds.
struct PipelineCli {
  std::string metric = "inv-euclid";
  std::string regime = "strict";
  int k = 2;
  int svd_rank = 0;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  bool center_value = false;
  CLI::Option* center_opt = nullptr;
  std::optional<long long> sweeps;
  std::optional<int> restarts;
  std::optional<double> t_initial;
  std::optional<double> t_final;
  std::string solver = "anneal";
  bool no_mds = false;
  std::uint64_t seed = 0;

  qclust::PipelineOptions resolve() const {
    qclust::PipelineOptions opt;
    opt.metric = metric == "cosine" ? qclust::Metric::Cosine
                                    : qclust::Metric::InvEuclid;
    opt.regime = regime == "strict" ? qclust::LambdaRegime::Strict
                                    : qclust::LambdaRegime::OutlierPermitting;
    opt.k = k;
    opt.svd_rank = svd_rank;
    opt.lambda1 = lambda1;
    opt.lambda2 = lambda2;
    if (center_opt != nullptr && center_opt->count() > 0)
      opt.center = center_value;
    opt.sweeps = sweeps;
    opt.restarts = restarts;
    opt.t_initial = t_initial;
    opt.t_final = t_final;
    opt.brute_force_solver = solver == "brute-force";
    opt.with_mds = !no_mds;
    opt.seed = seed;
    return opt;
  }
};

void add_metric_opts(CLI::App* sub, PipelineCli& p) {
  sub->add_option("--metric", p.metric, "Similarity metric")
      ->check(CLI::IsMember({"inv-euclid", "cosine"}));
  sub->add_option("--svd-rank", p.svd_rank,
                  "Low-rank denoising rank before similarity (0 = off)")
      ->check(CLI::NonNegativeNumber);
  p.center_opt = sub->add_flag(
      "--center,!--no-center", p.center_value,
      "Remove each row's mean before similarity (default: on for cosine)");
}

void add_qubo_opts(CLI::App* sub, PipelineCli& p) {
  sub->add_option("--k", p.k, "Number of clusters")
      ->required()
      ->check(CLI::PositiveNumber);
  sub->add_option("--lambda-regime", p.regime,
                  "Automatic penalty-weight regime")
      ->check(CLI::IsMember({"strict", "outlier-permitting"}));
  sub->add_option("--lambda1", p.lambda1, "Explicit one-hot penalty weight");
  sub->add_option("--lambda2", p.lambda2, "Explicit balance penalty weight");
}

void add_solver_opts(CLI::App* sub, PipelineCli& p) {
  sub->add_option("--sweeps", p.sweeps, "Annealer sweeps per restart");
  sub->add_option("--restarts", p.restarts, "Annealer restarts");
  sub->add_option("--t-initial", p.t_initial, "Initial temperature");
  sub->add_option("--t-final", p.t_final, "Final temperature");
  sub->add_option("--seed", p.seed, "Solver seed");
  sub->add_option("--solver", p.solver, "anneal or brute-force (tiny models)")
      ->check(CLI::IsMember({"anneal", "brute-force"}));
}

json vector_json(const std::vector<double>& v) { return json(v); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_json(const qclust::ClusterReport& r) {
  json j;
  j["sizes"] = r.sizes;
  j["outlier_count"] = r.outlier_count;
  j["assignments"] = r.assignment.cluster_of;
  j["source"] =
      r.assignment.source == qclust::AssignmentSource::Qubo ? "qubo" : "kmeans";
  json repaired = json::array();
  for (const auto& rp : r.assignment.repaired)
    repaired.push_back({{"point", rp.point}, {"discarded", rp.discarded}});
  j["repaired"] = std::move(repaired);
  json means = json::array();
  for (Eigen::Index c = 0; c < r.means.rows(); ++c) {
    if (!r.has_mean[static_cast<std::size_t>(c)]) {
      means.push_back(nullptr);
      continue;
    }
    json row = json::array();
    for (Eigen::Index p = 0; p < r.means.cols(); ++p)
      row.push_back(r.means(c, p));
    means.push_back(std::move(row));
  }
  j["means"] = std::move(means);
  if (r.energy) {
    j["energy"] = {{"similarity_term", r.energy->similarity_term},
                   {"onehot_penalty", r.energy->onehot_penalty},
                   {"balance_penalty", r.energy->balance_penalty},
                   {"total", r.energy->total}};
  } else {
    j["energy"] = nullptr;
  }
  j["rmse_per_class"] =
      r.rmse_per_class ? json(*r.rmse_per_class) : json(nullptr);
  j["mds"] = r.mds ? matrix_json(*r.mds) : json(nullptr);
  if (r.mds) {
    try {
      j["overlap"] = qclust::overlap_diagnostic(*r.mds, r.assignment);
    } catch (const std::exception&) {
      j["overlap"] = nullptr;
    }
  } else {
    j["overlap"] = nullptr;
  }
  return j;
}

void write_dumps(const qclust::ClusterReport& r, const qclust::Dataset& input,
                 const std::string& dump_mds, const std::string& dump_means,
                 const std::string& dump_means_frames) {
  if (!dump_mds.empty()) {
    if (!r.mds) throw qclust::FormatError("--dump-mds: no MDS coordinates");
    write_csv_matrix(dump_mds, *r.mds);
  }
  if (!dump_means.empty()) write_csv_matrix(dump_means, r.means);
  if (!dump_means_frames.empty()) {
    if (!input.frame_shape)
      throw qclust::FormatError("--dump-means-frames requires frame input");
    qclust::Dataset stack;
    stack.data = r.means;
    stack.frame_shape = input.frame_shape;
    qclust::write_frames(dump_means_frames, stack);
  }
}

void dump_spectrum_csv(const qclust::Dataset& input,
                       const qclust::PipelineOptions& opt,
                       const std::string& path) {
  // The spectrum of exactly the matrix the denoiser sees: standardized rows
  // on the inverse-Euclidean path, raw rows on the cosine path.
  const qclust::Dataset pre =
      opt.metric == qclust::Metric::InvEuclid
          ? qclust::standardize(input, qclust::StandardizeMode::PerSeries)
          : input;
  const int full = static_cast<int>(std::min(pre.n(), pre.m()));
  const qclust::TruncatedBasis basis = qclust::truncated_svd(pre, full);
  std::ofstream f(path);
  if (!f) throw qclust::IoError("cannot write '" + path + "'");
  for (int i = 0; i < basis.rank; ++i) f << basis.s(i) << '\n';
  if (!f) throw qclust::IoError("write failed for '" + path + "'");
}

json solver_config_json(const PipelineCli& cli, const qclust::AnnealParams& p) {
  if (cli.solver == "brute-force") return {{"type", "brute-force"}};
  return {{"type", "anneal"},          {"sweeps", p.sweeps},
          {"restarts", p.restarts},    {"t_initial", p.t_initial},
          {"t_final", p.t_final},      {"seed", p.seed},
          {"schedule", "geometric"}};
}

int run_cluster_cmd(const InputOpts& in, const PipelineCli& cli,
                    const std::string& out_path,
                    const std::string& dump_similarity,
                    const std::string& dump_spectrum,
                    const std::string& dump_mds, const std::string& dump_means,
                    const std::string& dump_means_frames) {
  const qclust::Dataset input = load_input(in);
  const qclust::PipelineOptions opt = cli.resolve();
  const qclust::ClusterOutcome outcome = qclust::run_cluster(input, opt);

  json j;
  j["command"] = "cluster";
  j["input"] = in.path;
  j["dataset_digest"] = outcome.digest;
  j["timestamp"] = iso_now();
  j["config"] = {{"metric", cli.metric},
                 {"k", cli.k},
                 {"lambda_regime", cli.regime},
                 {"lambda1", outcome.lambdas.lambda1},
                 {"lambda2", outcome.lambdas.lambda2},
                 {"svd_rank", cli.svd_rank},
                 {"center", opt.center.value_or(opt.metric ==
                                                qclust::Metric::Cosine)},
                 {"solver", solver_config_json(cli, outcome.params)}};
  j["result"] = report_json(outcome.report);
  j["result"]["best_energy"] = outcome.solve.best_energy;
  j["result"]["energy_trace"] = vector_json(outcome.solve.energy_trace);
  j["result"]["restarts_hitting_best"] = outcome.solve.restarts_hitting_best;
  emit(j, out_path);

  if (!dump_similarity.empty())
    write_csv_matrix(dump_similarity, outcome.similarity.values);
  if (!dump_spectrum.empty()) dump_spectrum_csv(input, opt, dump_spectrum);
  write_dumps(outcome.report, input, dump_mds, dump_means, dump_means_frames);
  return 0;
}

int run_baseline_cmd(const InputOpts& in, const PipelineCli& cli, int n_init,
                     int max_iter, const std::string& out_path,
                     const std::string& dump_mds,
                     const std::string& dump_means) {
  const qclust::Dataset input = load_input(in);
  qclust::PipelineOptions opt = cli.resolve();
  opt.kmeans_max_iter = max_iter;
  const qclust::BaselineOutcome outcome =
      qclust::run_baseline(input, opt, n_init);

  json j;
  j["command"] = "baseline";
  j["input"] = in.path;
  j["dataset_digest"] = outcome.digest;
  j["timestamp"] = iso_now();
  j["config"] = {{"k", cli.k},
                 {"seed", cli.seed},
                 {"n_init", n_init},
                 {"max_iter", max_iter},
                 {"metric", cli.metric},
                 {"svd_rank", cli.svd_rank},
                 {"center", opt.center.value_or(opt.metric ==
                                                qclust::Metric::Cosine)}};
  j["result"] = report_json(outcome.report);
  j["result"]["inertia"] = outcome.kmeans.inertia;
  j["result"]["iterations"] = outcome.kmeans.iterations;
  emit(j, out_path);
  write_dumps(outcome.report, input, dump_mds, dump_means, "");
  return 0;
}

int run_synth_cmd(const qclust::SynthSpec& spec, const std::string& out_path,
                  std::string phases_path) {
  const qclust::SynthResult result = qclust::generate(spec);
  qclust::write_frames(out_path, result.dataset);
  if (phases_path.empty()) phases_path = out_path + ".phases.csv";
  std::ofstream f(phases_path);
  if (!f) throw qclust::IoError("cannot write '" + phases_path + "'");
  for (double phi : result.true_phases) f << phi << '\n';
  if (!f) throw qclust::IoError("write failed for '" + phases_path + "'");
  return 0;
}

int run_mds_cmd(const InputOpts& in, PipelineCli& cli,
                const std::string& out_path) {
  const qclust::Dataset input = load_input(in);
  cli.metric = "cosine";  // angular distance exists only on the cosine path
  const qclust::PipelineOptions opt = cli.resolve();
  const Eigen::MatrixXd coords = qclust::classical_mds(
      qclust::angular_distance(qclust::build_similarity(input, opt)));
  if (out_path.empty()) {
    for (Eigen::Index i = 0; i < coords.rows(); ++i)
      std::cout << coords(i, 0) << ',' << coords(i, 1) << '\n';
    return 0;
  }
  write_csv_matrix(out_path, coords);
  return 0;
}

json load_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qclust::IoError("cannot open '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw qclust::FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("dataset_digest") || !j.contains("result"))
    throw qclust::FormatError("'" + path + "' is not a run report");
  return j;
}

json summarize_report(const json& r) {
  const json& res = r.at("result");
  json s;
  s["command"] = r.value("command", "");
  s["source"] = res.value("source", "");
  s["sizes"] = res.value("sizes", json::array());
  s["outlier_count"] = res.value("outlier_count", 0);
  s["energy"] = res.value("energy", json(nullptr));
  s["rmse_per_class"] = res.value("rmse_per_class", json(nullptr));
  s["overlap"] = res.value("overlap", json(nullptr));
  if (res.contains("inertia")) s["inertia"] = res["inertia"];
  return s;
}

int run_eval_cmd(const std::string& path_a, const std::string& path_b,
                 const std::string& out_path) {
  const json a = load_report(path_a);
  const json b = load_report(path_b);
  const std::string da = a.at("dataset_digest").get<std::string>();
  const std::string db = b.at("dataset_digest").get<std::string>();
  if (da != db)
    throw qclust::FormatError("reports reference different datasets: " + da +
                              " vs " + db);

  const json sa = summarize_report(a);
  const json sb = summarize_report(b);
  json delta;
  delta["outlier_count"] = sa["outlier_count"].get<int>() -
                           sb["outlier_count"].get<int>();
  if (sa["overlap"].is_number() && sb["overlap"].is_number())
    delta["overlap"] =
        sa["overlap"].get<double>() - sb["overlap"].get<double>();
  else
    delta["overlap"] = nullptr;
  if (sa["energy"].is_object() && sb["energy"].is_object())
    delta["energy_total"] = sa["energy"]["total"].get<double>() -
                            sb["energy"]["total"].get<double>();
  else
    delta["energy_total"] = nullptr;
  if (sa["rmse_per_class"].is_array() && sb["rmse_per_class"].is_array() &&
      sa["rmse_per_class"].size() == sb["rmse_per_class"].size()) {
    json d = json::array();
    for (std::size_t i = 0; i < sa["rmse_per_class"].size(); ++i)
      d.push_back(sa["rmse_per_class"][i].get<double>() -
                  sb["rmse_per_class"][i].get<double>());
    delta["rmse_per_class"] = std::move(d);
  } else {
    delta["rmse_per_class"] = nullptr;
  }

  json j;
  j["command"] = "eval";
  j["dataset_digest"] = da;
  j["a"] = sa;
  j["b"] = sb;
  j["delta"] = std::move(delta);
  emit(j, out_path);
  return 0;
}

int run_qubo_export_cmd(const InputOpts& in, const PipelineCli& cli,
                        const std::string& out_path) {
  const qclust::Dataset input = load_input(in);
  const qclust::PipelineOptions opt = cli.resolve();
  const qclust::SimilarityMatrix sim = qclust::build_similarity(input, opt);
  qclust::LambdaPair lp;
  if (opt.lambda1 && opt.lambda2) {
    lp = {*opt.lambda1, *opt.lambda2};
  } else {
    lp = qclust::auto_lambda(sim, opt.k, opt.regime);
  }
  const qclust::QuboModel m =
      qclust::build(sim, opt.k, lp.lambda1, lp.lambda2);

  json j;
  j["n"] = m.n;
  j["k"] = m.k;
  j["lambda1"] = m.lambda1;
  j["lambda2"] = m.lambda2;
  j["offset"] = m.offset;
  json linear = json::array();
  for (Eigen::Index v = 0; v < m.linear.size(); ++v)
    linear.push_back(m.linear(v));
  j["linear"] = std::move(linear);
  json quadratic = json::array();
  for (const auto& [key, coef] : m.quadratic)
    quadratic.push_back({key.first, key.second, coef});
  j["quadratic"] = std::move(quadratic);
  emit(j, out_path);
  return 0;
}

int emit_error(const char* type, const std::string& message, int code) {
  json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cout << j.dump(2) << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-series clustering via binary quadratic optimization"};
  app.require_subcommand(1);

  InputOpts in;
  PipelineCli cli;
  std::string out_path, dump_similarity, dump_spectrum, dump_mds, dump_means,
      dump_means_frames;
  int n_init = 1;
  int max_iter = 300;
  qclust::SynthSpec spec;
  std::string phases_path, report_a, report_b;

  CLI::App* cluster = app.add_subcommand(
      "cluster", "Cluster series by annealing the quadratic objective");
  add_input_opts(cluster, in);
  add_metric_opts(cluster, cli);
  add_qubo_opts(cluster, cli);
  add_solver_opts(cluster, cli);
  cluster->add_flag("--no-mds", cli.no_mds,
                    "Skip MDS coordinates on the cosine path");
  cluster->add_option("--out", out_path, "Report JSON path (default stdout)");
  cluster->add_option("--dump-similarity", dump_similarity,
                      "Write the similarity matrix as CSV");
  cluster->add_option("--dump-spectrum", dump_spectrum,
                      "Write singular values as CSV");
  cluster->add_option("--dump-mds", dump_mds, "Write MDS coordinates as CSV");
  cluster->add_option("--dump-means", dump_means,
                      "Write cluster means as CSV");
  cluster->add_option("--dump-means-frames", dump_means_frames,
                      "Write cluster means as an FSK1 stack");
  cluster->callback([&] {
    run_cluster_cmd(in, cli, out_path, dump_similarity, dump_spectrum,
                    dump_mds, dump_means, dump_means_frames);
  });

  CLI::App* baseline =
      app.add_subcommand("baseline", "k-means++ comparison clustering");
  add_input_opts(baseline, in);
  add_metric_opts(baseline, cli);
  baseline->add_option("--k", cli.k, "Number of clusters")
      ->required()
      ->check(CLI::PositiveNumber);
  baseline->add_option("--seed", cli.seed, "Seeding RNG seed");
  baseline->add_option("--n-init", n_init, "Runs; keep the best inertia")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--max-iter", max_iter, "Lloyd iteration cap")
      ->check(CLI::PositiveNumber);
  baseline->add_flag("--no-mds", cli.no_mds,
                     "Skip MDS coordinates on the cosine path");
  baseline->add_option("--out", out_path, "Report JSON path (default stdout)");
  baseline->add_option("--dump-mds", dump_mds, "Write MDS coordinates as CSV");
  baseline->add_option("--dump-means", dump_means,
                       "Write cluster means as CSV");
  baseline->callback([&] {
    run_baseline_cmd(in, cli, n_init, max_iter, out_path, dump_mds,
                     dump_means);
  });

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a periodic two-pattern frame stack with noise");
  synth->add_option("--frames", spec.n_frames, "Frame count")
      ->check(CLI::Range(2, 1 << 20));
  synth->add_option("--height", spec.height, "Frame height")
      ->check(CLI::PositiveNumber);
  synth->add_option("--width", spec.width, "Frame width")
      ->check(CLI::PositiveNumber);
  synth->add_option("--periods", spec.n_periods, "Oscillation periods");
  synth->add_option("--amplitude", spec.amplitude, "Signal amplitude");
  synth->add_option("--noise-sigma", spec.noise_sigma, "Noise std dev");
  synth->add_option("--seed", spec.seed, "Generator seed");
  std::string synth_out;
  synth->add_option("--out", synth_out, "FSK1 output path")->required();
  synth->add_option("--phases-out", phases_path,
                    "True-phase CSV path (default <out>.phases.csv)");
  synth->callback([&] { run_synth_cmd(spec, synth_out, phases_path); });

  CLI::App* mds =
      app.add_subcommand("mds", "Angular-distance MDS coordinates (CSV)");
  add_input_opts(mds, in);
  add_metric_opts(mds, cli);
  mds->add_option("--out", out_path, "Coordinate CSV path (default stdout)");
  mds->callback([&] { run_mds_cmd(in, cli, out_path); });

  CLI::App* eval =
      app.add_subcommand("eval", "Compare two run reports side by side");
  eval->add_option("report_a", report_a, "First report JSON")->required();
  eval->add_option("report_b", report_b, "Second report JSON")->required();
  eval->add_option("--out", out_path, "Comparison JSON path (default stdout)");
  eval->callback([&] { run_eval_cmd(report_a, report_b, out_path); });

  CLI::App* qexport = app.add_subcommand(
      "qubo-export", "Write the QUBO model as interchange JSON");
  add_input_opts(qexport, in);
  add_metric_opts(qexport, cli);
  add_qubo_opts(qexport, cli);
  qexport->add_option("--out", out_path, "Model JSON path (default stdout)");
  qexport->callback([&] { run_qubo_export_cmd(in, cli, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const qclust::IoError& e) {
    return emit_error("io", e.what(), 2);
  } catch (const qclust::FormatError& e) {
    return emit_error("format", e.what(), 2);
  } catch (const std::exception& e) {
    return emit_error("computation", e.what(), 1);
  }
  return 0;
}
