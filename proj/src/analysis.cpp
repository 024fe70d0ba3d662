#include "qclust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace qclust {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_nk(int n, int k) {
  if (n < 1 || k < 1)
    throw std::invalid_argument("n and k must be positive");
}

// Sorted distinct label values; class index = position in this list.
std::vector<int> distinct_labels(const std::vector<int>& labels) {
  std::set<int> s(labels.begin(), labels.end());
  return std::vector<int>(s.begin(), s.end());
}

// Exact min-cost perfect matching on a square cost matrix (potentials
// method, O(k^3)). Returns row -> column.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) -
                           u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> match(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      match[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] =
          j - 1;
  return match;
}

// Largest-magnitude entry of each non-zero column made positive, mirroring
// the SVD sign convention.
void fix_column_signs(Eigen::MatrixXd& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).isZero(0.0)) continue;
    Eigen::Index imax = 0;
    x.col(j).cwiseAbs().maxCoeff(&imax);
    if (x(imax, j) < 0.0) x.col(j) = -x.col(j);
  }
}

struct Arc {
  double start = 0.0;   // in [0, 2*pi)
  double length = 0.0;  // in [0, 2*pi]
};

// Shortest arc covering all angles: the complement of the largest gap
// between circularly consecutive points.
Arc covering_arc(std::vector<double> angles) {
  std::sort(angles.begin(), angles.end());
  const std::size_t n = angles.size();
  if (n == 1) return {angles[0], 0.0};
  double max_gap = angles.front() + kTwoPi - angles.back();
  std::size_t after = 0;  // index of the angle that follows the largest gap
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = angles[i] - angles[i - 1];
    if (gap > max_gap) {
      max_gap = gap;
      after = i;
    }
  }
  return {angles[after], kTwoPi - max_gap};
}

double segment_overlap(double a1, double a2, double b1, double b2) {
  return std::max(0.0, std::min(a2, b2) - std::max(a1, b1));
}

// Intersection length of two circular arcs via their linear segments.
double arc_overlap(const Arc& a, const Arc& b) {
  const auto segments = [](const Arc& x) {
    std::vector<std::pair<double, double>> segs;
    if (x.start + x.length <= kTwoPi) {
      segs.emplace_back(x.start, x.start + x.length);
    } else {
      segs.emplace_back(x.start, kTwoPi);
      segs.emplace_back(0.0, x.start + x.length - kTwoPi);
    }
    return segs;
  };
  double total = 0.0;
  for (const auto& [a1, a2] : segments(a))
    for (const auto& [b1, b2] : segments(b))
      total += segment_overlap(a1, a2, b1, b2);
  return total;
}

}  // namespace

Assignment decode(const std::vector<std::uint8_t>& bits, int n, int k,
                  const SimilarityMatrix* sim) {
  check_nk(n, k);
  if (bits.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(k))
    throw std::invalid_argument("bit vector has length " +
                                std::to_string(bits.size()) + ", expected " +
                                std::to_string(n * k));
  for (std::uint8_t b : bits)
    if (b > 1) throw std::invalid_argument("bit vector entry not in {0, 1}");

  Assignment a;
  a.source = AssignmentSource::Qubo;
  a.cluster_of.assign(static_cast<std::size_t>(n), kOutlier);
  std::vector<std::pair<int, std::vector<int>>> ambiguous;
  for (int i = 0; i < n; ++i) {
    std::vector<int> members;
    for (int c = 0; c < k; ++c)
      if (bits[static_cast<std::size_t>(QuboModel::var_index(c, i, n))])
        members.push_back(c);
    if (members.size() == 1)
      a.cluster_of[static_cast<std::size_t>(i)] = members.front();
    else if (members.size() > 1)
      ambiguous.emplace_back(i, std::move(members));
  }

  // Repair: multi-assigned points go to the candidate cluster with the
  // largest similarity sum over the unambiguous members gathered above.
  for (auto& [i, members] : ambiguous) {
    if (sim == nullptr)
      throw std::invalid_argument(
          "point " + std::to_string(i) +
          " is multi-assigned; repair needs the similarity matrix");
    if (sim->n() != n)
      throw std::invalid_argument("similarity matrix size does not match n");
    int best = members.front();
    double best_sum = -std::numeric_limits<double>::infinity();
    for (int c : members) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i && a.cluster_of[static_cast<std::size_t>(j)] == c)
          sum += sim->values(i, j);
      if (sum > best_sum) {
        best_sum = sum;
        best = c;
      }
    }
    RepairedPoint rp;
    rp.point = i;
    for (int c : members)
      if (c != best) rp.discarded.push_back(c);
    a.repaired.push_back(std::move(rp));
    a.cluster_of[static_cast<std::size_t>(i)] = best;
  }
  return a;
}

std::vector<std::uint8_t> encode(const Assignment& a, int n, int k) {
  check_nk(n, k);
  if (a.cluster_of.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("assignment length does not match n");
  std::vector<std::uint8_t> bits(
      static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0);
  for (int i = 0; i < n; ++i) {
    const int c = a.cluster_of[static_cast<std::size_t>(i)];
    if (c == kOutlier) continue;
    if (c < 0 || c >= k)
      throw std::invalid_argument("cluster id out of range");
    bits[static_cast<std::size_t>(QuboModel::var_index(c, i, n))] = 1;
  }
  return bits;
}

ClusterReport ensemble_average(const Dataset& d, const Assignment& a, int k) {
  const int n = static_cast<int>(d.n());
  check_nk(n, k);
  if (a.cluster_of.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("assignment length does not match dataset");

  ClusterReport r;
  r.assignment = a;
  r.sizes.assign(static_cast<std::size_t>(k), 0);
  r.means = Eigen::MatrixXd::Zero(k, d.m());
  r.has_mean.assign(static_cast<std::size_t>(k), false);
  for (int i = 0; i < n; ++i) {
    const int c = a.cluster_of[static_cast<std::size_t>(i)];
    if (c == kOutlier) {
      ++r.outlier_count;
      continue;
    }
    if (c < 0 || c >= k)
      throw std::invalid_argument("cluster id out of range");
    ++r.sizes[static_cast<std::size_t>(c)];
    r.means.row(c) += d.data.row(i);
  }
  for (int c = 0; c < k; ++c) {
    if (r.sizes[static_cast<std::size_t>(c)] == 0) continue;
    r.means.row(c) /= static_cast<double>(r.sizes[static_cast<std::size_t>(c)]);
    r.has_mean[static_cast<std::size_t>(c)] = true;
  }
  return r;
}

std::vector<int> match_clusters(const Assignment& a,
                                const std::vector<int>& labels, int k) {
  if (a.cluster_of.size() != labels.size())
    throw std::invalid_argument("assignment and labels differ in length");
  const std::vector<int> classes = distinct_labels(labels);
  if (static_cast<int>(classes.size()) != k)
    throw std::invalid_argument(
        "label class count " + std::to_string(classes.size()) +
        " does not match cluster count " + std::to_string(k));

  Eigen::MatrixXd contingency = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = a.cluster_of[i];
    if (c == kOutlier) continue;
    const auto it = std::lower_bound(classes.begin(), classes.end(), labels[i]);
    contingency(c, static_cast<Eigen::Index>(it - classes.begin())) += 1.0;
  }
  return hungarian_min_cost(-contingency);  // maximize overlap
}

std::vector<double> rmse(const ClusterReport& report, const Dataset& d) {
  if (!d.labels)
    throw std::invalid_argument("rmse requires a labeled dataset");
  const int k = static_cast<int>(report.sizes.size());
  const std::vector<int> classes = distinct_labels(*d.labels);
  const std::vector<int> match = match_clusters(report.assignment, *d.labels, k);

  Eigen::MatrixXd class_means = Eigen::MatrixXd::Zero(k, d.m());
  std::vector<int> class_sizes(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const auto it = std::lower_bound(classes.begin(), classes.end(),
                                     (*d.labels)[static_cast<std::size_t>(i)]);
    const auto t = static_cast<Eigen::Index>(it - classes.begin());
    class_means.row(t) += d.data.row(i);
    ++class_sizes[static_cast<std::size_t>(t)];
  }
  for (int t = 0; t < k; ++t)
    class_means.row(t) /= static_cast<double>(class_sizes[static_cast<std::size_t>(t)]);

  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  for (int c = 0; c < k; ++c) {
    const int t = match[static_cast<std::size_t>(c)];
    if (!report.has_mean[static_cast<std::size_t>(c)])
      throw std::runtime_error("cluster " + std::to_string(c) +
                               " is empty; no mean to compare");
    const double mse =
        (report.means.row(c) - class_means.row(t)).squaredNorm() /
        static_cast<double>(d.m());
    out[static_cast<std::size_t>(t)] = std::sqrt(mse);
  }
  return out;
}

Eigen::MatrixXd classical_mds(const AngularDistanceMatrix& dist) {
  const Eigen::Index n = dist.n();
  if (dist.values.cols() != n)
    throw std::invalid_argument("distance matrix is not square");
  if (n < 2) throw std::invalid_argument("need at least 2 points");

  const Eigen::MatrixXd d2 = dist.values.array().square();
  const Eigen::VectorXd row_mean = d2.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - row_mean(j) + grand_mean);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition did not converge");
  const double l1 = es.eigenvalues()(n - 1);
  const double l2 = es.eigenvalues()(n - 2);
  if (!(l1 > 0.0))
    throw std::runtime_error(
        "degenerate geometry: leading MDS eigenvalue is not positive");

  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, 2);
  coords.col(0) = es.eigenvectors().col(n - 1) * std::sqrt(l1);
  if (l2 > 0.0) coords.col(1) = es.eigenvectors().col(n - 2) * std::sqrt(l2);
  fix_column_signs(coords);
  return coords;
}

double overlap_diagnostic(const Eigen::MatrixXd& mds, const Assignment& a) {
  const Eigen::Index n = mds.rows();
  if (mds.cols() != 2)
    throw std::invalid_argument("expected n x 2 MDS coordinates");
  if (a.cluster_of.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("assignment length does not match coordinates");

  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (a.cluster_of[static_cast<std::size_t>(i)] != kOutlier)
      radii.push_back(mds.row(i).norm());
  if (radii.empty())
    throw std::runtime_error("no assigned points for the overlap diagnostic");
  const auto mid = radii.begin() + static_cast<std::ptrdiff_t>(radii.size() / 2);
  std::nth_element(radii.begin(), mid, radii.end());
  const double median = *mid;

  int k = 0;
  for (int c : a.cluster_of) k = std::max(k, c + 1);
  std::vector<std::vector<double>> angles(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = a.cluster_of[static_cast<std::size_t>(i)];
    if (c == kOutlier) continue;
    const double r = mds.row(i).norm();
    if (std::abs(r - median) > 0.25 * median) continue;  // ring outlier
    double theta = std::atan2(mds(i, 1), mds(i, 0));
    if (theta < 0.0) theta += kTwoPi;
    angles[static_cast<std::size_t>(c)].push_back(theta);
  }

  std::vector<Arc> arcs;
  for (const auto& cluster_angles : angles)
    if (!cluster_angles.empty()) arcs.push_back(covering_arc(cluster_angles));
  if (arcs.size() < 2)
    throw std::runtime_error(
        "fewer than 2 clusters have inlier members; overlap undefined");

  double total = 0.0;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j)
      total += arc_overlap(arcs[i], arcs[j]);
  return std::min(1.0, total / kTwoPi);
}

}  // namespace qclust
