#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qclust/similarity.hpp"

namespace qclust {

// Binary expansion of the clustering objective over n*k variables. Variable
// v = c*n + i carries "point i belongs to cluster c"; this indexing is fixed
// so exported models stay portable. Quadratic terms are stored strictly
// upper-triangular (u < v) exactly once — no symmetric duplicates.
struct QuboModel {
  int n_vars = 0;
  Eigen::VectorXd linear;
  std::map<std::pair<int, int>, double> quadratic;
  double offset = 0.0;
  int n = 0;
  int k = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  static int var_index(int c, int i, int n) { return c * n + i; }
};

// The three objective terms evaluated separately: negated within-cluster
// similarity, one-hot penalty, cluster-size balance penalty.
struct EnergyBreakdown {
  double similarity_term = 0.0;
  double onehot_penalty = 0.0;
  double balance_penalty = 0.0;
  double total = 0.0;
};

enum class LambdaRegime { Strict, OutlierPermitting };

struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

QuboModel build(const SimilarityMatrix& s, int k, double lambda1,
                double lambda2);

double energy(const QuboModel& m, const std::vector<std::uint8_t>& bits);

EnergyBreakdown energy_breakdown(const SimilarityMatrix& s, int k,
                                 double lambda1, double lambda2,
                                 const std::vector<std::uint8_t>& bits);

// Penalty weights from the stated ratios: lambda2 scales the balance term to
// the similarity term's magnitude at balanced assignments, lambda1 is 100x
// (strict one-hot) or 30x (outliers tolerated) above it.
LambdaPair auto_lambda(const SimilarityMatrix& s, int k, LambdaRegime regime);

}  // namespace qclust
