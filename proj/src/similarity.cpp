#include "qclust/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qclust {

SimilarityMatrix cosine_similarity(const Dataset& d) {
  const Eigen::Index n = d.n();
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms(i) = d.data.row(i).norm();
    if (!(norms(i) > 0.0))
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " has zero norm; direction undefined");
  }
  SimilarityMatrix s;
  s.kind = SimilarityKind::Cosine;
  s.values.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double c = d.data.row(i).dot(d.data.row(j)) / (norms(i) * norms(j));
      c = std::clamp(c, -1.0, 1.0);  // rounding guard; |c| can exceed 1 by ~eps
      s.values(i, j) = c;
      s.values(j, i) = c;
    }
  }
  return s;
}

SimilarityMatrix inverse_euclidean(const Dataset& d) {
  const Eigen::Index n = d.n();
  SimilarityMatrix s;
  s.kind = SimilarityKind::InverseEuclidean;
  s.values.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (d.data.row(i) - d.data.row(j)).norm();
      const double v = 1.0 / std::max(dist, kDistanceFloor);
      s.values(i, j) = v;
      s.values(j, i) = v;
    }
  }
  return s;
}

AngularDistanceMatrix angular_distance(const SimilarityMatrix& s) {
  if (s.kind != SimilarityKind::Cosine)
    throw std::invalid_argument(
        "angular distance requires a cosine similarity matrix");
  const Eigen::Index n = s.n();
  AngularDistanceMatrix a;
  a.derivation = SimilarityKind::Cosine;
  a.values.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // |sin(theta/2)| = sqrt((1 - cos theta) / 2); the clamp in the cosine
      // path guarantees the radicand is non-negative.
      const double v = std::sqrt((1.0 - s.values(i, j)) / 2.0);
      a.values(i, j) = v;
      a.values(j, i) = v;
    }
  }
  return a;
}

}  // namespace qclust
