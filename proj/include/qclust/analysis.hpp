#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "qclust/dataset.hpp"
#include "qclust/qubo.hpp"
#include "qclust/similarity.hpp"

namespace qclust {

// cluster_of entry for points no cluster claimed (weak one-hot regime).
inline constexpr int kOutlier = -1;

enum class AssignmentSource { Qubo, KMeans };

struct RepairedPoint {
  int point = 0;
  std::vector<int> discarded;  // cluster ids dropped by the repair rule
};

struct Assignment {
  std::vector<int> cluster_of;  // values in [0, k) or kOutlier
  std::vector<RepairedPoint> repaired;
  AssignmentSource source = AssignmentSource::Qubo;
};

struct ClusterReport {
  std::vector<int> sizes;
  Eigen::MatrixXd means;        // k x m; row c meaningful iff has_mean[c]
  std::vector<bool> has_mean;   // false for empty clusters, never zero-filled
  int outlier_count = 0;
  Assignment assignment;
  std::optional<EnergyBreakdown> energy;
  std::optional<std::vector<double>> rmse_per_class;
  std::optional<Eigen::MatrixXd> mds;  // n x 2
};

// Bits -> assignment under v = c*n + i. A point set in several clusters is
// repaired to the candidate maximizing its similarity sum over unambiguous
// (single-bit) members, which requires `sim`; pass nullptr only when
// multi-assignments cannot occur.
Assignment decode(const std::vector<std::uint8_t>& bits, int n, int k,
                  const SimilarityMatrix* sim = nullptr);

// Inverse of decode for one-hot assignments; outliers map to all-zero rows.
std::vector<std::uint8_t> encode(const Assignment& a, int n, int k);

// Per-cluster arithmetic means over the ORIGINAL rows; outliers excluded.
ClusterReport ensemble_average(const Dataset& d, const Assignment& a, int k);

// Maximum-overlap one-to-one matching of k clusters to k label classes,
// solved exactly. Returns match[cluster] = class id.
std::vector<int> match_clusters(const Assignment& a,
                                const std::vector<int>& labels, int k);

// RMSE between each matched cluster mean and its class mean, indexed by
// class. Requires labels with exactly k distinct classes.
std::vector<double> rmse(const ClusterReport& report, const Dataset& d);

// Classical (Torgerson) MDS to two dimensions. The second coordinate is
// zeroed when the geometry is essentially one-dimensional.
Eigen::MatrixXd classical_mds(const AngularDistanceMatrix& dist);

// Fraction of the circle (saturated at 1) covered by pairwise overlaps of the
// clusters' angular intervals, computed over inlier points whose embedded
// radius is within 25% of the median radius.
double overlap_diagnostic(const Eigen::MatrixXd& mds, const Assignment& a);

}  // namespace qclust
