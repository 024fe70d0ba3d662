#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qclust/analysis.hpp"
#include "qclust/annealer.hpp"
#include "qclust/dataset.hpp"
#include "qclust/kmeans.hpp"
#include "qclust/qubo.hpp"
#include "qclust/similarity.hpp"

namespace qclust {

enum class Metric { InvEuclid, Cosine };

struct PipelineOptions {
  Metric metric = Metric::InvEuclid;
  int k = 2;
  int svd_rank = 0;  // 0 = no denoising
  std::optional<double> lambda1;
  std::optional<double> lambda2;  // explicit weights beat the regime
  LambdaRegime regime = LambdaRegime::Strict;
  std::optional<bool> center;  // row mean removal; default on for cosine only
  // Solver overrides; unset fields fall back to default_params(model).
  std::optional<long long> sweeps;
  std::optional<int> restarts;
  std::optional<double> t_initial;
  std::optional<double> t_final;
  bool brute_force_solver = false;
  bool with_mds = true;  // cosine runs attach MDS coordinates
  int kmeans_max_iter = 300;
  std::uint64_t seed = 0;
};

struct ClusterOutcome {
  ClusterReport report;
  LambdaPair lambdas;
  AnnealParams params;
  SolveResult solve;
  SimilarityMatrix similarity;
  std::string digest;  // of the input dataset as given
};

struct BaselineOutcome {
  ClusterReport report;
  KMeansResult kmeans;
  std::string digest;
};

// Rows prepared for similarity: standardize (inverse-Euclidean path) or
// denoise + center (cosine path), per the options.
Dataset preprocess(const Dataset& input, const PipelineOptions& opt);

SimilarityMatrix build_similarity(const Dataset& input,
                                  const PipelineOptions& opt);

// Ingest -> similarity -> QUBO -> solve -> decode -> report. Ensemble means
// and RMSE always use the input rows as given, never the denoised ones.
ClusterOutcome run_cluster(const Dataset& input, const PipelineOptions& opt);

// k-means++ on the raw rows (best inertia over n_init seeded runs); when the
// options select the cosine path, MDS coordinates are attached so baseline
// and QUBO reports are comparable on the same embedding.
BaselineOutcome run_baseline(const Dataset& input, const PipelineOptions& opt,
                             int n_init = 1);

}  // namespace qclust
