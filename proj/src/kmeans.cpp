#include "qclust/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "qclust/rng.hpp"

namespace qclust {

namespace {

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int bounded(std::mt19937_64& rng, int n) {
  return static_cast<int>(
      (static_cast<unsigned __int128>(rng()) * static_cast<std::uint64_t>(n)) >>
      64);
}

// Sample an index proportionally to non-negative weights; a weightless pool
// (all-zero: every point already coincides with a centroid) falls back to a
// uniform draw.
int weighted_pick(std::mt19937_64& rng, const Eigen::VectorXd& w) {
  const double total = w.sum();
  if (!(total > 0.0)) return bounded(rng, static_cast<int>(w.size()));
  double target = canonical(rng) * total;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    target -= w(i);
    if (target < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(w.size() - 1);  // rounding spill-over
}

Eigen::MatrixXd seed_centroids(const Dataset& d, int k,
                               std::mt19937_64& rng) {
  const Eigen::Index n = d.n();
  Eigen::MatrixXd centroids(k, d.m());
  centroids.row(0) = d.data.row(bounded(rng, static_cast<int>(n)));
  Eigen::VectorXd dist2 =
      (d.data.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    centroids.row(c) = d.data.row(weighted_pick(rng, dist2));
    dist2 = dist2.cwiseMin(
        (d.data.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans_pp(const Dataset& d, int k, std::uint64_t seed,
                       int max_iter) {
  const Eigen::Index n = d.n();
  if (n == 0) throw std::invalid_argument("dataset is empty");
  if (k < 1) throw std::invalid_argument("cluster count must be at least 1");
  if (k > n)
    throw std::invalid_argument("cluster count " + std::to_string(k) +
                                " exceeds point count " + std::to_string(n));
  if (max_iter < 1)
    throw std::invalid_argument("max_iter must be at least 1");

  std::mt19937_64 rng(splitmix64(seed));
  KMeansResult r;
  r.centroids = seed_centroids(d, k, rng);
  r.assignments.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd own_dist2(n);  // squared distance to assigned centroid

  for (int iter = 0; iter < max_iter; ++iter) {
    const std::vector<int> previous = r.assignments;

    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d2 = (d.data.row(i) - r.centroids.row(c)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      r.assignments[static_cast<std::size_t>(i)] = best;
      own_dist2(i) = best_d2;
    }
    std::fill(sizes.begin(), sizes.end(), 0);
    for (int c : r.assignments) ++sizes[static_cast<std::size_t>(c)];

    // Repair emptied clusters with the globally worst-fitted point, never
    // draining a singleton (that would just move the hole).
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index steal = -1;
      double worst = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int home = r.assignments[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(home)] <= 1) continue;
        if (own_dist2(i) > worst) {
          worst = own_dist2(i);
          steal = i;
        }
      }
      if (steal < 0)
        throw std::runtime_error("cannot repair empty cluster");  // k > n only
      --sizes[static_cast<std::size_t>(
          r.assignments[static_cast<std::size_t>(steal)])];
      r.assignments[static_cast<std::size_t>(steal)] = c;
      ++sizes[static_cast<std::size_t>(c)];
      own_dist2(steal) = 0.0;  // becomes its own centroid below
    }

    r.centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      r.centroids.row(r.assignments[static_cast<std::size_t>(i)]) +=
          d.data.row(i);
    for (int c = 0; c < k; ++c)
      r.centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      inertia += (d.data.row(i) -
                  r.centroids.row(r.assignments[static_cast<std::size_t>(i)]))
                     .squaredNorm();
    r.inertia = inertia;
    r.inertia_trace.push_back(inertia);
    r.iterations = iter + 1;

    if (r.assignments == previous && iter > 0) break;
  }
  return r;
}

}  // namespace qclust
