#pragma once

#include <Eigen/Dense>

#include "qclust/dataset.hpp"

namespace qclust {

enum class SimilarityKind { InverseEuclidean, Cosine };

// Pairwise d_{i,j} consumed by the QUBO builder. Symmetric; the diagonal is
// never read by consumers and is held at 0 so serialized matrices are
// unambiguous.
struct SimilarityMatrix {
  Eigen::MatrixXd values;
  SimilarityKind kind = SimilarityKind::InverseEuclidean;
  Eigen::Index n() const { return values.rows(); }
};

// |sin(theta/2)| between series directions, in [0, 1]. Only derivable from a
// cosine matrix; `derivation` records that provenance.
struct AngularDistanceMatrix {
  Eigen::MatrixXd values;
  SimilarityKind derivation = SimilarityKind::Cosine;
  Eigen::Index n() const { return values.rows(); }
};

// Distance floor for the inverse-Euclidean metric: duplicates map to 1/eps
// instead of infinity, keeping QUBO coefficients bounded.
inline constexpr double kDistanceFloor = 1e-9;

SimilarityMatrix cosine_similarity(const Dataset& d);
SimilarityMatrix inverse_euclidean(const Dataset& d);
AngularDistanceMatrix angular_distance(const SimilarityMatrix& s);

}  // namespace qclust
