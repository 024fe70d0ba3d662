#pragma once

#include <Eigen/Dense>

#include "qclust/dataset.hpp"

namespace qclust {

// Top-r SVD factors of the data matrix in series-as-columns orientation:
// data^T = u * diag(s) * v^T with u m x r, v n x r.
struct TruncatedBasis {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;  // descending, non-negative
  Eigen::MatrixXd v;
  int rank = 0;
};

inline constexpr int kDefaultSvdRank = 5;

TruncatedBasis truncated_svd(const Dataset& d, int rank);

// Rank-r reconstruction of the dataset; labels and frame_shape carry through.
// Consumed only by the similarity stage: downstream ensemble averaging always
// works on the un-truncated data.
Dataset denoise(const Dataset& d, int rank);

}  // namespace qclust
