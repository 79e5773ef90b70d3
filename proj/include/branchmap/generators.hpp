#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "branchmap/error.hpp"
#include "branchmap/scalar_field.hpp"

namespace branchmap {

/// Isotropic Gaussian bump in unit-square coordinates.
struct Peak {
  double x = 0.5;
  double y = 0.5;
  double amplitude = 1.0;
  double width = 0.1;
};

/// Sum of bumps over a gentle dome, sampled on a rows x cols grid spanning
/// [0,1]^2. With `wrap_x` the bumps repeat horizontally with period 1.
inline ScalarField2D render_peaks(int rows, int cols, const std::vector<Peak>& peaks, double dome = 0.05,
                                  bool wrap_x = false) {
  if (rows < 2 || cols < 2) throw PreconditionError("render_peaks: grid must be at least 2x2");
  ScalarField2D f;
  f.rows = rows;
  f.cols = cols;
  f.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double y = static_cast<double>(r) / (rows - 1);
    for (int c = 0; c < cols; ++c) {
      const double x = static_cast<double>(c) / (cols - 1);
      double v = dome * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.5);
      for (const Peak& p : peaks) {
        double dx = std::abs(x - p.x);
        if (wrap_x) dx = std::min(dx, 1.0 - dx);
        const double dy = y - p.y;
        v += p.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * p.width * p.width));
      }
      f.at(r, c) = v;
    }
  }
  return f;
}

/// Ensemble of four large bumps, one of them surrounded by a ring of small
/// bumps, optionally with a fifth bump in the middle. Every jitter range is
/// scaled by `jitter`; with jitter 0 all members coincide.
struct EnsembleSpec {
  int members = 20;
  int rows = 96;
  int cols = 96;
  std::uint64_t seed = 1;
  double jitter = 1.0;

  double large_amplitude = 1.0;
  double amplitude_jitter = 0.06;
  double large_width = 0.08;
  double width_jitter = 0.006;
  double position_jitter = 0.015;

  int small_count = 5;
  double small_amplitude = 0.28;
  double small_amplitude_jitter = 0.03;
  double small_width = 0.022;
  double small_ring = 0.21;

  bool central_peak = false;
  double central_amplitude = 0.9;
  int outlier_index = -1;  // member without the central bump

  double noise = 0.0;  // uniform per-vertex noise amplitude
};

inline EnsembleSpec outlier_ensemble_spec() {
  EnsembleSpec s;
  s.central_peak = true;
  s.outlier_index = 7;
  return s;
}

inline std::vector<ScalarField2D> generate_ensemble(const EnsembleSpec& spec) {
  if (spec.members < 1) throw PreconditionError("generate_ensemble: members must be positive");
  if (spec.outlier_index >= spec.members) throw PreconditionError("generate_ensemble: outlier index out of range");
  if (spec.small_count < 0 || spec.jitter < 0 || spec.noise < 0) {
    throw PreconditionError("generate_ensemble: counts, jitter and noise must be non-negative");
  }
  std::mt19937_64 rng(spec.seed);
  auto jit = [&](double range) {
    return std::uniform_real_distribution<double>(-1.0, 1.0)(rng) * range * spec.jitter;
  };
  const double centers[4][2] = {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  const double pi = std::acos(-1.0);

  std::vector<ScalarField2D> out;
  for (int m = 0; m < spec.members; ++m) {
    std::vector<Peak> peaks;
    for (const auto& c : centers) {
      peaks.push_back({c[0] + jit(spec.position_jitter), c[1] + jit(spec.position_jitter),
                       spec.large_amplitude + jit(spec.amplitude_jitter), spec.large_width + jit(spec.width_jitter)});
    }
    const Peak host = peaks[0];
    for (int k = 0; k < spec.small_count; ++k) {
      const double angle = 2.0 * pi * k / std::max(1, spec.small_count) + jit(0.1);
      const double ring = spec.small_ring + jit(spec.position_jitter);
      peaks.push_back({host.x + ring * std::cos(angle), host.y + ring * std::sin(angle),
                       spec.small_amplitude + jit(spec.small_amplitude_jitter), spec.small_width});
    }
    const Peak centre{0.5 + jit(spec.position_jitter), 0.5 + jit(spec.position_jitter),
                      spec.central_amplitude + jit(spec.amplitude_jitter), spec.large_width + jit(spec.width_jitter)};
    if (spec.central_peak && m != spec.outlier_index) peaks.push_back(centre);
    auto field = render_peaks(spec.rows, spec.cols, peaks);
    if (spec.noise > 0) {
      std::uniform_real_distribution<double> u(-spec.noise, spec.noise);
      for (double& v : field.values) v += u(rng);
    }
    out.push_back(std::move(field));
  }
  return out;
}

/// Bumps drifting to the right with wrap-around, returning to the same
/// configuration every `period` frames. `variation` adds a slow seeded
/// change of every bump's height that grows with time, so frames one
/// period apart are closer than frames two periods apart.
struct PeriodicSpec {
  int length = 225;
  int period = 75;
  int rows = 32;
  int cols = 96;
  std::uint64_t seed = 1;
  double variation = 1.0;
  int bumps = 3;
};

inline std::vector<ScalarField2D> generate_periodic_series(const PeriodicSpec& spec) {
  if (spec.period < 2) throw PreconditionError("generate_periodic_series: period must be at least 2");
  if (spec.length < 2 * spec.period) {
    throw PreconditionError("generate_periodic_series: length must cover at least two periods");
  }
  if (spec.bumps < 1) throw PreconditionError("generate_periodic_series: at least one bump is needed");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> base(spec.bumps), lane(spec.bumps), drift(spec.bumps);
  for (int k = 0; k < spec.bumps; ++k) {
    base[k] = 0.55 + 0.35 * k / std::max(1, spec.bumps - 1);
    lane[k] = 0.3 + 0.4 * k / std::max(1, spec.bumps - 1) + 0.05 * u(rng);
    drift[k] = 0.02 * u(rng);
  }
  const double pi = std::acos(-1.0);
  std::vector<ScalarField2D> out;
  for (int t = 0; t < spec.length; ++t) {
    const double phase = static_cast<double>(t % spec.period) / spec.period;
    const double age = static_cast<double>(t) / spec.length;
    std::vector<Peak> peaks;
    for (int k = 0; k < spec.bumps; ++k) {
      double x = std::fmod(static_cast<double>(k) / spec.bumps + phase, 1.0);
      // Height rises and falls as the bump travels.
      const double shape = 0.75 + 0.25 * std::sin(2.0 * pi * x + 0.7 * k);
      peaks.push_back({x, lane[k], base[k] * shape * (1.0 + spec.variation * drift[k] * age), 0.07});
    }
    out.push_back(render_peaks(spec.rows, spec.cols, peaks, 0.05, true));
  }
  return out;
}

}  // namespace branchmap
