#include "qclust/qubo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qclust {

namespace {

void check_inputs(const SimilarityMatrix& s, int k, double lambda1,
                  double lambda2) {
  if (s.values.rows() != s.values.cols())
    throw std::invalid_argument("similarity matrix is not square");
  if (k < 1) throw std::invalid_argument("cluster count must be at least 1");
  if (lambda1 < 0.0 || lambda2 < 0.0)
    throw std::invalid_argument("penalty weights must be non-negative");
}

void check_bits(const std::vector<std::uint8_t>& bits, std::size_t expected) {
  if (bits.size() != expected)
    throw std::invalid_argument("bit vector has length " +
                                std::to_string(bits.size()) + ", expected " +
                                std::to_string(expected));
  for (std::uint8_t b : bits)
    if (b > 1) throw std::invalid_argument("bit vector entry not in {0, 1}");
}

// Insert a strictly-upper-triangular coefficient; duplicates would silently
// double-count, so they are a hard logic error. Exact zeros are dropped.
void set_quadratic(QuboModel& m, int u, int v, double coef) {
  if (u >= v) throw std::logic_error("quadratic key not upper-triangular");
  if (coef == 0.0) return;
  if (!m.quadratic.emplace(std::make_pair(u, v), coef).second)
    throw std::logic_error("duplicate quadratic key");
}

}  // namespace

QuboModel build(const SimilarityMatrix& s, int k, double lambda1,
                double lambda2) {
  check_inputs(s, k, lambda1, lambda2);
  const int n = static_cast<int>(s.n());

  QuboModel m;
  m.n = n;
  m.k = k;
  m.lambda1 = lambda1;
  m.lambda2 = lambda2;
  m.n_vars = n * k;
  // Expanding the squares with q^2 = q: every variable picks up
  // lambda2 - lambda1 on the diagonal, and the constant n*lambda1 remains.
  m.linear = Eigen::VectorXd::Constant(m.n_vars, lambda2 - lambda1);
  m.offset = static_cast<double>(n) * lambda1;

  // Same cluster, distinct points: -d_ij from the similarity term plus
  // 2*lambda2 from S_c^2.
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        set_quadratic(m, QuboModel::var_index(c, i, n),
                      QuboModel::var_index(c, j, n),
                      2.0 * lambda2 - s.values(i, j));

  // Same point, distinct clusters: 2*lambda1 from the one-hot square.
  if (lambda1 != 0.0)
    for (int c = 0; c < k; ++c)
      for (int cp = c + 1; cp < k; ++cp)
        for (int i = 0; i < n; ++i)
          set_quadratic(m, QuboModel::var_index(c, i, n),
                        QuboModel::var_index(cp, i, n), 2.0 * lambda1);

  return m;
}

double energy(const QuboModel& m, const std::vector<std::uint8_t>& bits) {
  check_bits(bits, static_cast<std::size_t>(m.n_vars));
  double e = m.offset;
  for (int v = 0; v < m.n_vars; ++v)
    if (bits[static_cast<std::size_t>(v)]) e += m.linear(v);
  for (const auto& [key, coef] : m.quadratic)
    if (bits[static_cast<std::size_t>(key.first)] &&
        bits[static_cast<std::size_t>(key.second)])
      e += coef;
  return e;
}

EnergyBreakdown energy_breakdown(const SimilarityMatrix& s, int k,
                                 double lambda1, double lambda2,
                                 const std::vector<std::uint8_t>& bits) {
  check_inputs(s, k, lambda1, lambda2);
  const int n = static_cast<int>(s.n());
  check_bits(bits, static_cast<std::size_t>(n) * static_cast<std::size_t>(k));

  const auto q = [&](int c, int i) -> double {
    return bits[static_cast<std::size_t>(QuboModel::var_index(c, i, n))];
  };

  EnergyBreakdown b;
  for (int c = 0; c < k; ++c) {
    double size = 0.0;
    for (int i = 0; i < n; ++i) {
      size += q(c, i);
      for (int j = i + 1; j < n; ++j)
        b.similarity_term -= s.values(i, j) * q(c, i) * q(c, j);
    }
    b.balance_penalty += lambda2 * size * size;
  }
  for (int i = 0; i < n; ++i) {
    double memberships = 0.0;
    for (int c = 0; c < k; ++c) memberships += q(c, i);
    b.onehot_penalty += lambda1 * (memberships - 1.0) * (memberships - 1.0);
  }
  b.total = b.similarity_term + b.onehot_penalty + b.balance_penalty;
  return b;
}

LambdaPair auto_lambda(const SimilarityMatrix& s, int k, LambdaRegime regime) {
  if (s.values.rows() != s.values.cols())
    throw std::invalid_argument("similarity matrix is not square");
  if (k < 1) throw std::invalid_argument("cluster count must be at least 1");
  const Eigen::Index n = s.n();
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && s.values(i, j) > 0.0) {
        sum += s.values(i, j);
        ++count;
      }
  if (count == 0)
    throw std::invalid_argument(
        "similarity matrix has no positive off-diagonal entries; cannot scale "
        "penalty weights");
  // At a balanced one-hot assignment the balance term is lambda2 * n^2 / k and
  // the similarity term gathers ~n/2 * mean(d) per cluster pair structure;
  // lambda2 = mean(d) * n / (2k) puts the two on the same footing.
  const double mean_positive = sum / static_cast<double>(count);
  LambdaPair lp;
  lp.lambda2 =
      mean_positive * static_cast<double>(n) / (2.0 * static_cast<double>(k));
  lp.lambda1 = (regime == LambdaRegime::Strict ? 100.0 : 30.0) * lp.lambda2;
  return lp;
}

}  // namespace qclust
