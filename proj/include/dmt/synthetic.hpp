#pragma once

// Deterministic synthetic point tracks with complex, non-periodic motion.

#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>
#include <vector>

#include "dmt/tracking.hpp"
#include "dmt/vec2.hpp"

namespace dmt::synthetic {

struct ComplexMotionConfig {
  std::size_t num_points = 100;
  std::size_t num_frames = 400;
  std::uint64_t seed = 7;
  Vec2 centre{256.0, 256.0};
  double spread = 100.0;        // half-width of the box the rest positions are drawn from
  double noise = 0.5;           // uniform jitter amplitude in pixels
  double amplitudes[3] = {60.0, 30.0, 15.0};
  double periods[3] = {131.0, 71.0, 41.0};  // in frames, pairwise incommensurate
};

// Each point follows a sum of three sinusoids per axis with its own phases plus uniform noise.
inline TrackSet complex_motion_tracks(const ComplexMotionConfig& cfg = {}) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TrackedPoint> points;
  points.reserve(cfg.num_points);
  for (std::size_t j = 0; j < cfg.num_points; ++j) {
    const Vec2 rest{cfg.centre.x + cfg.spread * (2.0 * unit(rng) - 1.0),
                    cfg.centre.y + cfg.spread * (2.0 * unit(rng) - 1.0)};
    double phase[2][3];
    for (auto& axis : phase) {
      for (double& p : axis) p = 2.0 * std::numbers::pi * unit(rng);
    }
    TrackedPoint pt{static_cast<int>(j), {}};
    pt.coords.reserve(cfg.num_frames);
    for (std::size_t f = 0; f < cfg.num_frames; ++f) {
      double off[2] = {0.0, 0.0};
      for (int a = 0; a < 2; ++a) {
        for (int k = 0; k < 3; ++k) {
          off[a] += cfg.amplitudes[k] *
                    std::sin(2.0 * std::numbers::pi * static_cast<double>(f) / cfg.periods[k] + phase[a][k]);
        }
        off[a] += cfg.noise * (2.0 * unit(rng) - 1.0);
      }
      pt.coords.push_back({rest.x + off[0], rest.y + off[1]});
    }
    points.push_back(std::move(pt));
  }
  return TrackSet(cfg.num_frames, std::move(points));
}

}  // namespace dmt::synthetic
