#include "qclust/lowrank.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qclust {

namespace {

// Flip each singular pair so the largest-magnitude entry of the left vector
// is positive; makes outputs deterministic for golden tests.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

// Replace column j of q with a unit vector orthogonal to columns [0, j).
// Used when a singular value is numerically zero and the corresponding
// direction cannot be recovered from the data itself.
void fill_orthonormal(Eigen::MatrixXd& q, Eigen::Index j) {
  for (Eigen::Index cand = 0; cand < q.rows(); ++cand) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(q.rows(), cand);
    for (Eigen::Index p = 0; p < j; ++p) e -= q.col(p).dot(e) * q.col(p);
    const double nrm = e.norm();
    if (nrm > 0.5) {
      q.col(j) = e / nrm;
      return;
    }
  }
  throw std::runtime_error("orthonormal completion failed");  // unreachable: j < rows
}

// Thin SVD of y (m x n) through the Gram matrix of the smaller side. Avoids
// ever forming a factorization on the long dimension, which for image stacks
// can run to hundreds of thousands of pixels.
TruncatedBasis gram_route(const Eigen::MatrixXd& y, int rank) {
  const bool tall = y.rows() >= y.cols();
  const Eigen::MatrixXd gram = tall ? Eigen::MatrixXd(y.transpose() * y)
                                    : Eigen::MatrixXd(y * y.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition did not converge");

  // Eigenvalues come out ascending; take the top `rank` from the back. The
  // short-side factor is the eigenvector, the long-side factor is recovered
  // by applying y and normalizing (its norm re-estimates sigma more
  // accurately than the square root of a small eigenvalue).
  const Eigen::Index dim = gram.rows();
  Eigen::MatrixXd shrt(dim, rank);
  Eigen::MatrixXd lng(tall ? y.rows() : y.cols(), rank);
  Eigen::VectorXd s(rank);
  for (int j = 0; j < rank; ++j)
    shrt.col(j) = es.eigenvectors().col(dim - 1 - j);
  const double smax = std::sqrt(std::max(es.eigenvalues()(dim - 1), 0.0));
  const double tol = smax * 1e-12;
  for (int j = 0; j < rank; ++j) {
    Eigen::VectorXd w = tall ? Eigen::VectorXd(y * shrt.col(j))
                             : Eigen::VectorXd(y.transpose() * shrt.col(j));
    // Re-orthogonalize against earlier long-side columns; tiny correction for
    // well-separated spectra but keeps the basis orthonormal near ties.
    for (int p = 0; p < j; ++p) w -= lng.col(p).dot(w) * lng.col(p);
    s(j) = w.norm();
    if (s(j) > tol && s(j) > 0.0) {
      lng.col(j) = w / s(j);
    } else {
      s(j) = 0.0;
      fill_orthonormal(lng, j);
    }
  }

  // Re-estimated norms can invert a near-tie from the eigen ordering.
  std::vector<int> order(static_cast<size_t>(rank));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s(a) > s(b); });
  TruncatedBasis b;
  b.rank = rank;
  b.u.resize(y.rows(), rank);
  b.s.resize(rank);
  b.v.resize(y.cols(), rank);
  for (int j = 0; j < rank; ++j) {
    b.s(j) = s(order[static_cast<size_t>(j)]);
    b.u.col(j) = tall ? lng.col(order[static_cast<size_t>(j)])
                      : shrt.col(order[static_cast<size_t>(j)]);
    b.v.col(j) = tall ? shrt.col(order[static_cast<size_t>(j)])
                      : lng.col(order[static_cast<size_t>(j)]);
  }
  return b;
}

TruncatedBasis dense_route(const Eigen::MatrixXd& y, int rank) {
  TruncatedBasis b;
  b.rank = rank;
  const unsigned opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  if (std::min(y.rows(), y.cols()) <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(y, opts);
    b.u = svd.matrixU().leftCols(rank);
    b.s = svd.singularValues().head(rank);
    b.v = svd.matrixV().leftCols(rank);
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(y, opts);
    if (svd.info() != Eigen::Success)
      throw std::runtime_error("singular value decomposition did not converge");
    b.u = svd.matrixU().leftCols(rank);
    b.s = svd.singularValues().head(rank);
    b.v = svd.matrixV().leftCols(rank);
  }
  return b;
}

}  // namespace

TruncatedBasis truncated_svd(const Dataset& d, int rank) {
  const Eigen::Index n = d.n();
  const Eigen::Index m = d.m();
  if (rank < 1 || rank > std::min(n, m))
    throw std::invalid_argument("svd rank " + std::to_string(rank) +
                                " out of range [1, " +
                                std::to_string(std::min(n, m)) + "]");
  // Samples as columns: y is m x n.
  const Eigen::MatrixXd y = d.data.transpose();
  const Eigen::Index lo = std::min(y.rows(), y.cols());
  const Eigen::Index hi = std::max(y.rows(), y.cols());
  TruncatedBasis b = hi >= 8 * lo ? gram_route(y, rank) : dense_route(y, rank);
  fix_signs(b.u, b.v);
  return b;
}

Dataset denoise(const Dataset& d, int rank) {
  const TruncatedBasis b = truncated_svd(d, rank);
  Dataset out;
  out.data = b.v * b.s.asDiagonal() * b.u.transpose();  // transpose of u s v^T
  out.labels = d.labels;
  out.frame_shape = d.frame_shape;
  return out;
}

}  // namespace qclust
