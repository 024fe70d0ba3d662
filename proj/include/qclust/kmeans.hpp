#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "qclust/dataset.hpp"

namespace qclust {

struct KMeansResult {
  std::vector<int> assignments;       // length n, values in [0, k)
  Eigen::MatrixXd centroids;          // k x m
  double inertia = 0.0;               // sum of squared distances to centroids
  int iterations = 0;
  std::vector<double> inertia_trace;  // one entry per Lloyd iteration
};

// k-means with D^2 (k-means++) seeding and Lloyd iterations to an assignment
// fixpoint. Deterministic per seed. Emptied clusters are repaired by stealing
// the point farthest from its current centroid.
KMeansResult kmeans_pp(const Dataset& d, int k, std::uint64_t seed,
                       int max_iter = 300);

}  // namespace qclust
