#include "qclust/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "qclust/lowrank.hpp"

namespace qclust {

namespace {

LambdaPair resolve_lambdas(const SimilarityMatrix& s,
                           const PipelineOptions& opt) {
  if (opt.lambda1.has_value() != opt.lambda2.has_value())
    throw std::invalid_argument(
        "lambda1 and lambda2 must be given together or not at all");
  if (opt.lambda1) return {*opt.lambda1, *opt.lambda2};
  return auto_lambda(s, opt.k, opt.regime);
}

void attach_common(ClusterReport& report, const Dataset& input,
                   const PipelineOptions& opt, const SimilarityMatrix* sim) {
  if (opt.metric == Metric::Cosine && opt.with_mds) {
    const SimilarityMatrix cosine =
        sim ? SimilarityMatrix{} : build_similarity(input, opt);
    report.mds = classical_mds(angular_distance(sim ? *sim : cosine));
  }
  if (input.labels) {
    std::vector<int> classes(*input.labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (static_cast<int>(classes.size()) == opt.k)
      report.rmse_per_class = rmse(report, input);
  }
}

}  // namespace

Dataset preprocess(const Dataset& input, const PipelineOptions& opt) {
  validate(input);
  const bool center =
      opt.center.value_or(opt.metric == Metric::Cosine);
  Dataset work;
  if (opt.metric == Metric::InvEuclid) {
    work = standardize(input, StandardizeMode::PerSeries);
    if (opt.svd_rank > 0) work = denoise(work, opt.svd_rank);
  } else {
    work = opt.svd_rank > 0 ? denoise(input, opt.svd_rank) : input;
  }
  if (center) work = center_rows(work);
  return work;
}

SimilarityMatrix build_similarity(const Dataset& input,
                                  const PipelineOptions& opt) {
  const Dataset work = preprocess(input, opt);
  return opt.metric == Metric::Cosine ? cosine_similarity(work)
                                      : inverse_euclidean(work);
}

ClusterOutcome run_cluster(const Dataset& input, const PipelineOptions& opt) {
  if (opt.k < 1) throw std::invalid_argument("k must be at least 1");

  ClusterOutcome out;
  out.digest = dataset_digest(input);
  out.similarity = build_similarity(input, opt);
  out.lambdas = resolve_lambdas(out.similarity, opt);
  const QuboModel model =
      build(out.similarity, opt.k, out.lambdas.lambda1, out.lambdas.lambda2);

  out.params = default_params(model);
  out.params.seed = opt.seed;
  if (opt.sweeps) out.params.sweeps = *opt.sweeps;
  if (opt.restarts) out.params.restarts = *opt.restarts;
  if (opt.t_initial) out.params.t_initial = *opt.t_initial;
  if (opt.t_final) out.params.t_final = *opt.t_final;
  out.solve =
      opt.brute_force_solver ? brute_force(model) : solve(model, out.params);

  const Assignment a = decode(out.solve.best_bits, static_cast<int>(input.n()),
                              opt.k, &out.similarity);
  out.report = ensemble_average(input, a, opt.k);
  out.report.energy = energy_breakdown(out.similarity, opt.k,
                                       out.lambdas.lambda1,
                                       out.lambdas.lambda2,
                                       out.solve.best_bits);
  attach_common(out.report, input, opt, &out.similarity);
  return out;
}

BaselineOutcome run_baseline(const Dataset& input, const PipelineOptions& opt,
                             int n_init) {
  if (n_init < 1) throw std::invalid_argument("n_init must be at least 1");
  validate(input);

  BaselineOutcome out;
  out.digest = dataset_digest(input);
  bool first = true;
  for (int attempt = 0; attempt < n_init; ++attempt) {
    KMeansResult r = kmeans_pp(input, opt.k,
                               opt.seed + static_cast<std::uint64_t>(attempt),
                               opt.kmeans_max_iter);
    if (first || r.inertia < out.kmeans.inertia) {
      out.kmeans = std::move(r);
      first = false;
    }
  }

  Assignment a;
  a.cluster_of = out.kmeans.assignments;
  a.source = AssignmentSource::KMeans;
  out.report = ensemble_average(input, a, opt.k);
  attach_common(out.report, input, opt, nullptr);
  return out;
}

}  // namespace qclust
