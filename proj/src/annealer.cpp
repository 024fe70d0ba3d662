#include "qclust/annealer.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qclust/rng.hpp"
#include "qclust/threads.hpp"

namespace qclust {

namespace {

// Quadratic terms in adjacency form: each upper-triangular entry appears in
// both endpoints' neighbor lists so a flip touches only its own star.
struct Adjacency {
  std::vector<int> offsets;
  std::vector<int> neighbor;
  std::vector<double> weight;
};

Adjacency build_adjacency(const QuboModel& m) {
  Adjacency a;
  a.offsets.assign(static_cast<std::size_t>(m.n_vars) + 1, 0);
  for (const auto& [key, coef] : m.quadratic) {
    if (key.first < 0 || key.first >= key.second || key.second >= m.n_vars)
      throw std::invalid_argument("quadratic key out of range");
    ++a.offsets[static_cast<std::size_t>(key.first) + 1];
    ++a.offsets[static_cast<std::size_t>(key.second) + 1];
    (void)coef;
  }
  std::partial_sum(a.offsets.begin(), a.offsets.end(), a.offsets.begin());
  a.neighbor.resize(static_cast<std::size_t>(a.offsets.back()));
  a.weight.resize(a.neighbor.size());
  std::vector<int> cursor(a.offsets.begin(), a.offsets.end() - 1);
  for (const auto& [key, coef] : m.quadratic) {
    const auto [u, v] = key;
    a.neighbor[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)])] = v;
    a.weight[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)]++)] = coef;
    a.neighbor[static_cast<std::size_t>(cursor[static_cast<std::size_t>(v)])] = u;
    a.weight[static_cast<std::size_t>(cursor[static_cast<std::size_t>(v)]++)] = coef;
  }
  return a;
}

void check_model(const QuboModel& m) {
  if (m.n_vars < 1) throw std::invalid_argument("model has no variables");
  if (m.linear.size() != m.n_vars)
    throw std::invalid_argument("linear term length does not match n_vars");
}

void check_params(const AnnealParams& p) {
  if (p.sweeps < 1) throw std::invalid_argument("sweeps must be at least 1");
  if (p.restarts < 1)
    throw std::invalid_argument("restarts must be at least 1");
  if (!(p.t_initial > 0.0) || !(p.t_final > 0.0) || !(p.t_final < p.t_initial))
    throw std::invalid_argument(
        "temperatures must satisfy 0 < t_final < t_initial");
}

// Unbiased bounded draw without division (fixed, portable mapping).
int bounded(std::mt19937_64& rng, int n) {
  return static_cast<int>(
      (static_cast<unsigned __int128>(rng()) * static_cast<std::uint64_t>(n)) >>
      64);
}

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Flip gain of variable v given the current bits: energy(flipped) - energy().
double flip_delta(const QuboModel& m, const Adjacency& a,
                  const std::vector<std::uint8_t>& bits, int v) {
  double acc = m.linear(v);
  for (int j = a.offsets[static_cast<std::size_t>(v)];
       j < a.offsets[static_cast<std::size_t>(v) + 1]; ++j)
    acc += a.weight[static_cast<std::size_t>(j)] *
           bits[static_cast<std::size_t>(a.neighbor[static_cast<std::size_t>(j)])];
  return bits[static_cast<std::size_t>(v)] ? -acc : acc;
}

struct RestartOutcome {
  std::vector<std::uint8_t> bits;
  double energy = std::numeric_limits<double>::infinity();
};

RestartOutcome run_restart(const QuboModel& m, const Adjacency& a,
                           const AnnealParams& p, int restart) {
  std::mt19937_64 rng(mix_seed(p.seed, static_cast<std::uint64_t>(restart)));
  const int nv = m.n_vars;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(nv));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);

  double e = energy(m, bits);
  std::vector<double> delta(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v)
    delta[static_cast<std::size_t>(v)] = flip_delta(m, a, bits, v);

  std::vector<std::uint8_t> best_bits = bits;
  double best_e = e;

  double t = p.t_initial;
  const double cool = p.sweeps > 1
                          ? std::pow(p.t_final / p.t_initial,
                                     1.0 / static_cast<double>(p.sweeps - 1))
                          : 1.0;
#ifndef NDEBUG
  long long accepted = 0;
#endif
  for (long long sweep = 0; sweep < p.sweeps; ++sweep) {
    for (int step = 0; step < nv; ++step) {
      const int v = bounded(rng, nv);
      const double dv = delta[static_cast<std::size_t>(v)];
      if (dv > 0.0 && !(canonical(rng) < std::exp(-dv / t))) continue;

      bits[static_cast<std::size_t>(v)] ^= 1u;
      e += dv;
      delta[static_cast<std::size_t>(v)] = -dv;
      const double dx = bits[static_cast<std::size_t>(v)] ? 1.0 : -1.0;
      for (int j = a.offsets[static_cast<std::size_t>(v)];
           j < a.offsets[static_cast<std::size_t>(v) + 1]; ++j) {
        const int u = a.neighbor[static_cast<std::size_t>(j)];
        const double w = a.weight[static_cast<std::size_t>(j)];
        delta[static_cast<std::size_t>(u)] +=
            (bits[static_cast<std::size_t>(u)] ? -1.0 : 1.0) * w * dx;
      }
      if (e < best_e) {
        best_e = e;
        best_bits = bits;
      }
#ifndef NDEBUG
      if (++accepted % 1000 == 0)
        assert(std::abs(e - energy(m, bits)) <=
               1e-8 * std::max(1.0, std::abs(e)));
#endif
    }
    t *= cool;
  }

  // Exact recompute so accumulated float drift never leaks out of a restart.
  RestartOutcome out;
  out.bits = std::move(best_bits);
  out.energy = energy(m, out.bits);
  return out;
}

}  // namespace

SolveResult solve(const QuboModel& m, const AnnealParams& p) {
  check_model(m);
  check_params(p);
  const Adjacency a = build_adjacency(m);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(p.restarts));
  const int n_threads = std::min(thread_budget(), p.restarts);
  if (n_threads <= 1) {
    for (int r = 0; r < p.restarts; ++r)
      outcomes[static_cast<std::size_t>(r)] = run_restart(m, a, p, r);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r; (r = next.fetch_add(1)) < p.restarts;)
        outcomes[static_cast<std::size_t>(r)] = run_restart(m, a, p, r);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SolveResult res;
  res.energy_trace.reserve(static_cast<std::size_t>(p.restarts));
  int best_r = 0;
  for (int r = 0; r < p.restarts; ++r) {
    res.energy_trace.push_back(outcomes[static_cast<std::size_t>(r)].energy);
    if (outcomes[static_cast<std::size_t>(r)].energy <
        outcomes[static_cast<std::size_t>(best_r)].energy)
      best_r = r;
  }
  res.best_bits = std::move(outcomes[static_cast<std::size_t>(best_r)].bits);
  res.best_energy = res.energy_trace[static_cast<std::size_t>(best_r)];
  const double tol = 1e-9 * std::max(1.0, std::abs(res.best_energy));
  for (double e : res.energy_trace)
    if (e <= res.best_energy + tol) ++res.restarts_hitting_best;
  return res;
}

SolveResult brute_force(const QuboModel& m) {
  check_model(m);
  if (m.n_vars > 24)
    throw std::invalid_argument("brute force limited to 24 variables, got " +
                                std::to_string(m.n_vars));
  const Adjacency a = build_adjacency(m);
  const int nv = m.n_vars;

  // Gray-code walk: state i has bits g(i) = i ^ (i >> 1), and g(i) differs
  // from g(i-1) in exactly bit ctz(i), so each state costs one flip delta.
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(nv), 0);
  double e = m.offset;
  std::vector<std::uint8_t> best_bits = bits;
  double best_e = e;
  const std::uint64_t total = 1ull << nv;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int v = std::countr_zero(i);
    e += flip_delta(m, a, bits, v);
    bits[static_cast<std::size_t>(v)] ^= 1u;
    if (e < best_e) {
      best_e = e;
      best_bits = bits;
    } else if (e == best_e && bits < best_bits) {
      best_bits = bits;
    }
  }

  SolveResult res;
  res.best_bits = std::move(best_bits);
  res.best_energy = energy(m, res.best_bits);
  res.energy_trace = {res.best_energy};
  res.restarts_hitting_best = 1;
  return res;
}

AnnealParams default_params(const QuboModel& m) {
  check_model(m);
  double max_abs = 0.0;
  double min_nonzero = std::numeric_limits<double>::infinity();
  const auto feed = [&](double c) {
    const double x = std::abs(c);
    if (x == 0.0) return;
    max_abs = std::max(max_abs, x);
    min_nonzero = std::min(min_nonzero, x);
  };
  for (Eigen::Index v = 0; v < m.linear.size(); ++v) feed(m.linear(v));
  for (const auto& [key, coef] : m.quadratic) feed(coef);

  AnnealParams p;
  if (max_abs == 0.0) {
    p.t_initial = 1.0;  // flat landscape; any schedule explores it
    p.t_final = 1e-3;
  } else {
    p.t_initial = max_abs;
    p.t_final = 1e-3 * min_nonzero;
  }
  p.sweeps = std::min<long long>(100ll * m.n_vars, 1'000'000ll);
  p.restarts = 16;
  p.seed = 0;
  p.schedule = Schedule::Geometric;
  return p;
}

}  // namespace qclust
