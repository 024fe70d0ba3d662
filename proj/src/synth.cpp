#include "qclust/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "qclust/rng.hpp"

namespace qclust {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_spec(const SynthSpec& spec) {
  if (spec.n_frames < 2 || spec.height < 1 || spec.width < 1)
    throw std::invalid_argument("need at least 2 frames and a nonempty frame");
  if (!(spec.n_periods > 0.0))
    throw std::invalid_argument("n_periods must be positive");
  if (!(spec.amplitude > 0.0))
    throw std::invalid_argument("amplitude must be positive");
  if (spec.noise_sigma < 0.0)
    throw std::invalid_argument("noise_sigma must be non-negative");
}

// A smooth spatial ramp wrapping twice across x and once across y. Summing
// complex exponentials of it over the pixel grid cancels exactly (roots of
// unity), which makes sin/cos of it orthogonal with unit RMS by construction.
double ramp(int x, int y, int width, int height) {
  return kTwoPi * (2.0 * (x + 0.5) / width + (y + 0.5) / height);
}

}  // namespace

std::vector<double> phases_of(const SynthSpec& spec) {
  check_spec(spec);
  std::vector<double> phases(static_cast<std::size_t>(spec.n_frames));
  for (int t = 0; t < spec.n_frames; ++t) {
    const double phi =
        std::fmod(kTwoPi * spec.n_periods * t / spec.n_frames, kTwoPi);
    phases[static_cast<std::size_t>(t)] = phi < 0.0 ? phi + kTwoPi : phi;
  }
  return phases;
}

SynthResult generate(const SynthSpec& spec) {
  check_spec(spec);
  const int pixels = spec.height * spec.width;
  Eigen::VectorXd p1(pixels), p2(pixels);
  const double root2 = std::sqrt(2.0);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      const double theta = ramp(x, y, spec.width, spec.height);
      p1(y * spec.width + x) = root2 * std::sin(theta);
      p2(y * spec.width + x) = root2 * std::cos(theta);
    }

  SynthResult out;
  out.true_phases = phases_of(spec);
  out.dataset.data.resize(spec.n_frames, pixels);
  out.dataset.frame_shape = FrameShape{spec.height, spec.width};
  for (int t = 0; t < spec.n_frames; ++t) {
    const double phi = out.true_phases[static_cast<std::size_t>(t)];
    out.dataset.data.row(t) =
        (1.0 + (spec.amplitude * std::sin(phi)) * p1.array() +
         (spec.amplitude * std::cos(phi)) * p2.array())
            .transpose();
    if (spec.noise_sigma > 0.0) {
      std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(t)));
      std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
      for (int p = 0; p < pixels; ++p) out.dataset.data(t, p) += gauss(rng);
    }
  }
  return out;
}

}  // namespace qclust
