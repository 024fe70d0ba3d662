#pragma once

#include <cstdint>
#include <vector>

#include "qclust/dataset.hpp"

namespace qclust {

// Periodic two-pattern image sequence with per-pixel Gaussian noise; defaults
// mimic a weak pressure signal (~2% of the DC level) observed at SNR ~ 1.
struct SynthSpec {
  int n_frames = 270;
  int height = 64;
  int width = 64;
  double n_periods = 13.7;  // non-integer: dense, duplicate-free phase cover
  double amplitude = 0.02;
  double noise_sigma = 0.02;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset dataset;                  // frames flattened row-major; shape set
  std::vector<double> true_phases;  // length n_frames, in [0, 2*pi)
};

// True phase of each frame: 2*pi*n_periods*t/n_frames, wrapped.
std::vector<double> phases_of(const SynthSpec& spec);

// frame_t = 1 + amplitude*(sin(phi_t)*P1 + cos(phi_t)*P2) + N(0, sigma^2),
// with P1, P2 fixed orthogonal patterns of exactly unit RMS. Deterministic
// per seed; each frame draws noise from its own substream.
SynthResult generate(const SynthSpec& spec);

}  // namespace qclust
