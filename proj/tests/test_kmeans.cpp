#include <doctest.h>

#include <Eigen/Dense>

#include <map>
#include <random>
#include <vector>

#include "qclust/kmeans.hpp"
#include "test_support.hpp"

using namespace qclust;

namespace {

double choose2(double x) { return x * (x - 1.0) / 2.0; }

// Adjusted Rand index between two labelings; 1.0 iff identical partitions.
double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, int> cells;
  std::map<int, int> row_sum, col_sum;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++cells[{a[i], b[i]}];
    ++row_sum[a[i]];
    ++col_sum[b[i]];
  }
  double index = 0.0, rows = 0.0, cols = 0.0;
  for (const auto& [key, count] : cells) index += choose2(count);
  for (const auto& [key, count] : row_sum) rows += choose2(count);
  for (const auto& [key, count] : col_sum) cols += choose2(count);
  const double total = choose2(static_cast<double>(a.size()));
  const double expected = rows * cols / total;
  const double maximum = (rows + cols) / 2.0;
  return (index - expected) / (maximum - expected);
}

double inertia_oracle(const Dataset& d, const KMeansResult& r) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i)
    sum += (d.data.row(i) -
            r.centroids.row(r.assignments[static_cast<std::size_t>(i)]))
               .squaredNorm();
  return sum;
}

}  // namespace

TEST_CASE("two separated pairs of identical points split cleanly at k=2") {
  Dataset d;
  d.data.resize(4, 2);
  d.data << 0, 0, 0, 0, 10, 10, 10, 10;
  const KMeansResult r = kmeans_pp(d, 2, 0);
  CHECK(r.inertia == doctest::Approx(0.0));
  CHECK(r.assignments[0] == r.assignments[1]);
  CHECK(r.assignments[2] == r.assignments[3]);
  CHECK(r.assignments[0] != r.assignments[2]);
}

TEST_CASE("k equal to n gives every point its own centroid") {
  std::mt19937_64 gen(51);
  const Dataset d = testsup::random_dataset(6, 3, gen);
  const KMeansResult r = kmeans_pp(d, 6, 1);
  CHECK(r.inertia == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<bool> used(6, false);
  for (int c : r.assignments) {
    CHECK_FALSE(used[static_cast<std::size_t>(c)]);
    used[static_cast<std::size_t>(c)] = true;
  }
}

TEST_CASE("well-separated Gaussian blobs are recovered for every seed") {
  std::mt19937_64 gen(52);
  Eigen::MatrixXd centers(3, 2);
  centers << 0, 0, 5, 0, 0, 5;
  const Dataset d = testsup::gaussian_blobs(centers, 20, 0.1, gen);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KMeansResult r = kmeans_pp(d, 3, seed);
    CHECK(adjusted_rand(r.assignments, *d.labels) == doctest::Approx(1.0));
  }
}

TEST_CASE("Lloyd iterations never increase the inertia") {
  std::mt19937_64 gen(53);
  const Dataset d = testsup::random_dataset(40, 4, gen);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const KMeansResult r = kmeans_pp(d, 5, seed);
    REQUIRE(!r.inertia_trace.empty());
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
      CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] + 1e-9);
    CHECK(r.inertia == doctest::Approx(r.inertia_trace.back()));
  }
}

TEST_CASE("reported inertia matches a direct recomputation") {
  std::mt19937_64 gen(54);
  const Dataset d = testsup::random_dataset(30, 3, gen);
  const KMeansResult r = kmeans_pp(d, 4, 7);
  CHECK(r.inertia == doctest::Approx(inertia_oracle(d, r)).epsilon(1e-9));
}

TEST_CASE("terminal centroids are the means of their members") {
  std::mt19937_64 gen(55);
  const Dataset d = testsup::random_dataset(25, 2, gen);
  const KMeansResult r = kmeans_pp(d, 3, 2);
  for (int c = 0; c < 3; ++c) {
    Eigen::RowVector2d mean = Eigen::RowVector2d::Zero();
    int count = 0;
    for (Eigen::Index i = 0; i < d.n(); ++i)
      if (r.assignments[static_cast<std::size_t>(i)] == c) {
        mean += d.data.row(i);
        ++count;
      }
    REQUIRE(count > 0);
    mean /= count;
    CHECK((r.centroids.row(c) - mean).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("duplicate-heavy data still yields k non-empty clusters") {
  // Four coincident points and one outlier force an empty-cluster repair.
  Dataset d;
  d.data.resize(5, 2);
  d.data << 1, 1, 1, 1, 1, 1, 1, 1, 9, 9;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const KMeansResult r = kmeans_pp(d, 3, seed);
    std::vector<int> sizes(3, 0);
    for (int c : r.assignments) {
      REQUIRE(c >= 0);
      REQUIRE(c < 3);
      ++sizes[static_cast<std::size_t>(c)];
    }
    for (int s : sizes) CHECK(s > 0);
  }
}

TEST_CASE("kmeans is deterministic per seed") {
  std::mt19937_64 gen(56);
  const Dataset d = testsup::random_dataset(20, 3, gen);
  const KMeansResult a = kmeans_pp(d, 4, 11);
  const KMeansResult b = kmeans_pp(d, 4, 11);
  CHECK(a.assignments == b.assignments);
  CHECK(a.inertia == b.inertia);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("invalid requests are rejected") {
  std::mt19937_64 gen(57);
  const Dataset d = testsup::random_dataset(3, 2, gen);
  CHECK_THROWS_AS(kmeans_pp(d, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_pp(d, 0, 0), std::invalid_argument);
  Dataset empty;
  empty.data = Eigen::MatrixXd::Zero(0, 2);
  CHECK_THROWS_AS(kmeans_pp(empty, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_pp(d, 2, 0, 0), std::invalid_argument);
}
