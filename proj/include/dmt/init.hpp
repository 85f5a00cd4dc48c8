#pragma once

// Animation initialization: motion-aware density map, seed sampling, track targets,
// ridge-fitted initial trajectories and the per-frame width schedule.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmt/error.hpp"
#include "dmt/fitting.hpp"
#include "dmt/grid.hpp"
#include "dmt/tracking.hpp"
#include "dmt/trajectory.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

inline constexpr double kDefaultBeta = 0.5;
inline constexpr double kDefaultMaxWidth = 3.0;

struct DensityMap {
  ScalarGrid probabilities;  // sums to 1

  std::size_t width() const noexcept { return probabilities.width; }
  std::size_t height() const noexcept { return probabilities.height; }
};

struct InitConfig {
  std::size_t num_strokes = 16;
  double beta = kDefaultBeta;
  int trajectory_degree = -1;  // negative: derive from the frame count
  double ridge_lambda = kDefaultRidgeLambda;
  std::uint64_t rng_seed = 0;
  int curve_degree = kDefaultCurveDegree;
  double initial_stroke_span = -1.0;  // negative: 0.05 * max(W, H)
  BasisKind basis = BasisKind::Bernstein;

  void validate() const {
    if (num_strokes < 1) throw ValidationError("init: need at least one stroke");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("init: beta must lie in [0,1]");
    if (curve_degree < 1) throw ValidationError("init: curve degree must be >= 1");
    if (!(ridge_lambda >= 0.0)) throw ValidationError("init: ridge lambda must be >= 0");
  }
};

struct MaskAreas {
  std::vector<double> areas;  // object pixel count per frame
  Canvas canvas;
};

// M_XDoG * ((1 - beta) M_attention + beta M_motion), elementwise, before normalization.
inline ScalarGrid compose_density_weights(const ScalarGrid& xdog, const ScalarGrid& attention,
                                          const ScalarGrid& motion, double beta) {
  if (!xdog.same_shape(attention) || !xdog.same_shape(motion)) {
    throw ValidationError("density maps differ in dimensions");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in [0,1]");
  auto in_unit = [](const ScalarGrid& g) {
    return std::all_of(g.data.begin(), g.data.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
  };
  if (!in_unit(xdog) || !in_unit(attention) || !in_unit(motion)) {
    throw ValidationError("density map inputs must lie in [0,1]");
  }
  ScalarGrid out(xdog.width, xdog.height);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.data[k] = xdog.data[k] * ((1.0 - beta) * attention.data[k] + beta * motion.data[k]);
  }
  return out;
}

inline DensityMap normalize_density(ScalarGrid weights) {
  const double total = std::accumulate(weights.data.begin(), weights.data.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateInputError("density map has no positive mass");
  }
  for (double& v : weights.data) v /= total;
  return {std::move(weights)};
}

inline DensityMap compose_density_map(const ScalarGrid& xdog, const ScalarGrid& attention,
                                      const MotionHeatmap& motion, double beta = kDefaultBeta) {
  return normalize_density(compose_density_weights(xdog, attention, motion.values, beta));
}

inline DensityMap uniform_density(std::size_t width, std::size_t height) {
  return normalize_density(ScalarGrid(width, height, 1.0));
}

// Categorical draws over pixels (with replacement), jittered uniformly inside the pixel.
inline std::vector<Vec2> sample_stroke_seeds(const DensityMap& density, std::size_t n_strokes,
                                             std::uint64_t seed) {
  if (n_strokes < 1) throw DomainError("need at least one stroke seed");
  const auto& p = density.probabilities.data;
  std::vector<double> cdf(p.size());
  double run = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0) || !std::isfinite(p[k])) {
      throw DegenerateInputError("density has a negative or non-finite entry");
    }
    run += p[k];
    cdf[k] = run;
  }
  if (!(run > 0.0)) throw DegenerateInputError("density has no positive mass");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> seeds;
  seeds.reserve(n_strokes);
  for (std::size_t s = 0; s < n_strokes; ++s) {
    const double u = unit(rng) * run;
    auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = std::min(k, cdf.size() - 1);
    while (p[k] == 0.0 && k > 0) --k;  // u landed exactly on a boundary
    const double x = static_cast<double>(k % density.width());
    const double y = static_cast<double>(k / density.width());
    seeds.push_back({x + unit(rng), y + unit(rng)});
  }
  return seeds;
}

// Target per seed: its nearest frame-0 track, translated so frame 0 sits on the seed.
inline std::vector<std::vector<Vec2>> assign_track_targets(std::span<const Vec2> seeds,
                                                           const TrackSet& tracks) {
  std::vector<std::vector<Vec2>> targets;
  targets.reserve(seeds.size());
  for (const auto& seed : seeds) {
    const std::size_t k = tracks.nearest_index(seed, 0);
    const auto& coords = tracks.points()[k].coords;
    std::vector<Vec2> traj;
    traj.reserve(coords.size());
    for (const auto& c : coords) traj.push_back(seed + (c - coords.front()));
    targets.push_back(std::move(traj));
  }
  return targets;
}

struct InitResult {
  SketchAnimation animation;
  std::vector<Vec2> seeds;
  std::vector<std::vector<Vec2>> targets;  // per stroke, one point per frame
};

inline InitResult init_animation_with_targets(const InitConfig& config, const DensityMap& density,
                                              const TrackSet& tracks, std::vector<double> widths) {
  config.validate();
  const std::size_t num_frames = tracks.num_frames();
  if (widths.size() != num_frames) {
    throw ValidationError("init: width schedule has " + std::to_string(widths.size()) +
                          " entries for " + std::to_string(num_frames) + " frames");
  }
  const Canvas canvas{static_cast<double>(density.width()), static_cast<double>(density.height())};
  const int degree = config.trajectory_degree >= 0 ? config.trajectory_degree
                                                   : default_trajectory_degree(num_frames);
  const double span = config.initial_stroke_span >= 0.0
                          ? config.initial_stroke_span
                          : 0.05 * std::max(canvas.width, canvas.height);
  const int m = config.curve_degree;

  InitResult result;
  result.seeds = sample_stroke_seeds(density, config.num_strokes, config.rng_seed);
  result.targets = assign_track_targets(result.seeds, tracks);

  std::vector<double> times(num_frames);
  for (std::size_t i = 0; i < num_frames; ++i) times[i] = frame_time(i, num_frames);
  const LinearFitter fitter(times, degree, FitMethod::ridge(config.ridge_lambda), config.basis);

  std::vector<Stroke> strokes;
  strokes.reserve(config.num_strokes);
  for (std::size_t s = 0; s < config.num_strokes; ++s) {
    std::seed_seq seq{config.rng_seed, static_cast<std::uint64_t>(s)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> angle_dist(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> jitter(-span / 8.0, span / 8.0);
    const double angle = angle_dist(rng);
    const Vec2 along{std::cos(angle), std::sin(angle)};
    const Vec2 across{-along.y, along.x};

    std::vector<TrajectoryPoly> controls;
    controls.reserve(static_cast<std::size_t>(m) + 1);
    for (int c = 0; c <= m; ++c) {
      const Vec2 offset = (static_cast<double>(c) / m - 0.5) * span * along + jitter(rng) * across;
      std::vector<Vec2> target(num_frames);
      for (std::size_t i = 0; i < num_frames; ++i) target[i] = result.targets[s][i] + offset;
      controls.push_back(fitter.fit(target));
    }
    strokes.emplace_back(std::move(controls));
  }
  result.animation = SketchAnimation(std::move(strokes), num_frames, canvas, std::move(widths));
  return result;
}

inline SketchAnimation init_animation(const InitConfig& config, const DensityMap& density,
                                      const TrackSet& tracks, std::vector<double> widths) {
  return init_animation_with_targets(config, density, tracks, std::move(widths)).animation;
}

// width_i = w_max * sqrt(Area_i / (W * H)).
inline std::vector<double> stroke_width_schedule(const MaskAreas& mask, double w_max) {
  if (!(w_max > 0.0)) throw DomainError("maximum stroke width must be positive");
  const double canvas_area = mask.canvas.width * mask.canvas.height;
  if (!(canvas_area > 0.0)) throw ValidationError("mask canvas must have positive area");
  std::vector<double> widths;
  widths.reserve(mask.areas.size());
  for (double area : mask.areas) {
    if (!(area >= 0.0 && area <= canvas_area)) {
      throw ValidationError("mask area " + std::to_string(area) + " outside [0, W*H]");
    }
    widths.push_back(w_max * std::sqrt(area / canvas_area));
  }
  return widths;
}

}  // namespace dmt
