#pragma once

#include <cstdint>
#include <vector>

#include "qclust/qubo.hpp"

namespace qclust {

enum class Schedule { Geometric };

struct AnnealParams {
  long long sweeps = 1000;  // full variable passes per restart
  int restarts = 16;
  double t_initial = 1.0;
  double t_final = 1e-3;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::Geometric;
};

struct SolveResult {
  std::vector<std::uint8_t> best_bits;
  double best_energy = 0.0;
  std::vector<double> energy_trace;  // per-restart best energies
  int restarts_hitting_best = 0;
};

// Simulated annealing over independent restarts. Deterministic for a fixed
// seed regardless of thread count: restart r draws its generator from
// mix_seed(seed, r) and results merge by (energy, restart index).
SolveResult solve(const QuboModel& m, const AnnealParams& p);

// Exhaustive enumeration for small models; ties break toward the
// lexicographically smallest bitstring.
SolveResult brute_force(const QuboModel& m);

AnnealParams default_params(const QuboModel& m);

}  // namespace qclust
