#pragma once

// Losses over a SketchAnimation with analytic gradients with respect to every trajectory
// coefficient, and an adaptive-moment optimizer driving them.
//
// Gradients are computed in two stages: each loss first produces d/d(curve point) for the
// per-frame sampled points, then the chain rule through the Bezier weights and the time
// basis rows maps those to the flat coefficient layout of flatten_parameters().

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmt/error.hpp"
#include "dmt/tracking.hpp"
#include "dmt/trajectory.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

inline constexpr int kDefaultSamplesPerStroke = 8;

struct LossWeights {
  double w_s = 1.0;  // attachment (semantic slot)
  double w_g = 0.0;  // geometry plugin slot
  double w_c = 0.5;  // temporal consistency

  void validate() const {
    if (!(w_s >= 0.0 && w_g >= 0.0 && w_c >= 0.0)) throw ValidationError("loss weights must be >= 0");
    if (!(w_s > 0.0 || w_g > 0.0 || w_c > 0.0)) {
      throw ValidationError("at least one loss weight must be positive");
    }
  }
};

struct OptimConfig {
  std::size_t iterations = 500;
  double step_size = 0.1;
  double moment_decay_1 = 0.9;
  double moment_decay_2 = 0.999;
  int n_p = kDefaultSamplesPerStroke;
  double epsilon = 1e-8;
  std::size_t log_every = 10;

  void validate() const {
    if (iterations < 1) throw ValidationError("optimizer needs at least one iteration");
    if (n_p < 2) throw ValidationError("need at least two samples per stroke");
    if (!(step_size >= 0.0)) throw ValidationError("step size must be >= 0");
    if (!(moment_decay_1 > 0.0 && moment_decay_1 < 1.0) ||
        !(moment_decay_2 > 0.0 && moment_decay_2 < 1.0)) {
      throw ValidationError("moment decays must lie in (0,1)");
    }
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (log_every < 1) throw ValidationError("log_every must be >= 1");
  }
};

struct HistoryEntry {
  std::size_t iteration = 0;
  double total = 0.0;
  double consistency = 0.0;
  double attachment = 0.0;
};

struct LossBreakdown {
  double total = 0.0;
  double consistency = 0.0;
  double attachment = 0.0;
  double geometry = 0.0;
  std::vector<HistoryEntry> history;
};

struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;  // flat layout of flatten_parameters()
};

// A differentiable term supplied from outside (e.g. a raster-based geometry loss).
class LossTerm {
 public:
  virtual ~LossTerm() = default;
  virtual std::string name() const = 0;
  // Returns the value and adds d(value)/d(parameters) into gradient.
  virtual double evaluate(const SketchAnimation& anim, std::span<double> gradient) const = 0;
};

struct LossPlugins {
  std::shared_ptr<const LossTerm> geometry;  // weighted by LossWeights::w_g
};

// Frozen N(p, i): tracked-point index for each (anchor frame, stroke, sample).
class NearestAssignment {
 public:
  NearestAssignment() = default;
  NearestAssignment(std::size_t frames, std::size_t strokes, std::size_t samples)
      : frames_(frames), strokes_(strokes), samples_(samples), index_(frames * strokes * samples) {}

  std::uint32_t& at(std::size_t frame, std::size_t stroke, std::size_t k) {
    return index_[(frame * strokes_ + stroke) * samples_ + k];
  }
  std::uint32_t at(std::size_t frame, std::size_t stroke, std::size_t k) const {
    return index_[(frame * strokes_ + stroke) * samples_ + k];
  }

  std::size_t frames() const noexcept { return frames_; }
  std::size_t strokes() const noexcept { return strokes_; }
  std::size_t samples() const noexcept { return samples_; }

  friend bool operator==(const NearestAssignment&, const NearestAssignment&) = default;

 private:
  std::size_t frames_ = 0, strokes_ = 0, samples_ = 0;
  std::vector<std::uint32_t> index_;
};

namespace detail {

// Basis rows at every frame time and control positions per frame for each stroke.
class FrameEvaluation {
 public:
  explicit FrameEvaluation(const SketchAnimation& anim) : anim_(&anim) {
    const std::size_t nf = anim.num_frames();
    for (const auto& s : anim.strokes()) {
      const auto key = std::pair{s.basis(), s.trajectory_degree()};
      if (!rows_.count(key)) {
        std::vector<std::vector<double>> rows(nf);
        for (std::size_t f = 0; f < nf; ++f) {
          rows[f] = stable_basis_row(s.basis(), s.trajectory_degree(), anim.frame_time(f)).values;
        }
        rows_.emplace(key, std::move(rows));
      }
    }
    controls_.resize(anim.num_strokes());
    for (std::size_t j = 0; j < anim.num_strokes(); ++j) {
      const auto& stroke = anim.strokes()[j];
      const auto& rows = time_rows(j);
      auto& ctrl = controls_[j];
      ctrl.assign(stroke.controls().size(), std::vector<Vec2>(nf));
      for (std::size_t c = 0; c < stroke.controls().size(); ++c) {
        const auto coeffs = stroke.controls()[c].coeffs();
        for (std::size_t f = 0; f < nf; ++f) ctrl[c][f] = combine(rows[f], coeffs);
      }
    }
  }

  const std::vector<std::vector<double>>& time_rows(std::size_t stroke) const {
    const auto& s = anim_->strokes()[stroke];
    return rows_.at(std::pair{s.basis(), s.trajectory_degree()});
  }

  // Control point c of stroke j at frame f.
  const std::vector<std::vector<Vec2>>& controls(std::size_t stroke) const { return controls_[stroke]; }

  Vec2 curve_point(std::size_t stroke, std::span<const double> u_row, std::size_t frame) const {
    Vec2 acc;
    const auto& ctrl = controls_[stroke];
    for (std::size_t c = 0; c < ctrl.size(); ++c) acc += u_row[c] * ctrl[c][frame];
    return acc;
  }

  // Chains d/d(control point c at frame f) of one stroke into the flat coefficient gradient.
  void backprop_controls(std::size_t stroke, const std::vector<std::vector<Vec2>>& control_grad,
                         std::span<double> gradient, std::size_t offset) const {
    const auto& rows = time_rows(stroke);
    const auto& s = anim_->strokes()[stroke];
    std::size_t base = offset;
    for (std::size_t c = 0; c < s.controls().size(); ++c) {
      const std::size_t nq = s.controls()[c].coeffs().size();
      for (std::size_t f = 0; f < control_grad[c].size(); ++f) {
        const Vec2 g = control_grad[c][f];
        if (g.x == 0.0 && g.y == 0.0) continue;
        const auto& row = rows[f];
        for (std::size_t q = 0; q < nq; ++q) {
          gradient[base + 2 * q] += row[q] * g.x;
          gradient[base + 2 * q + 1] += row[q] * g.y;
        }
      }
      base += 2 * nq;
    }
  }

 private:
  const SketchAnimation* anim_;
  std::map<std::pair<BasisKind, int>, std::vector<std::vector<double>>> rows_;
  std::vector<std::vector<std::vector<Vec2>>> controls_;
};

inline std::vector<double> sample_parameters(int n_p) {
  std::vector<double> u(static_cast<std::size_t>(n_p));
  for (int k = 0; k < n_p; ++k) u[k] = static_cast<double>(k) / (n_p - 1);
  return u;
}

// Bezier weights B_{m,c}(u_k) for every sample k.
inline std::vector<std::vector<double>> bezier_rows(int m, std::span<const double> u) {
  std::vector<std::vector<double>> rows;
  rows.reserve(u.size());
  for (double uk : u) rows.push_back(stable_basis_row(BasisKind::Bernstein, m, uk).values);
  return rows;
}

inline void check_consistency_inputs(const SketchAnimation& anim, const TrackSet& tracks, int n_p) {
  if (tracks.num_frames() != anim.num_frames()) {
    throw ValidationError("tracks have " + std::to_string(tracks.num_frames()) +
                          " frames, animation has " + std::to_string(anim.num_frames()));
  }
  if (n_p < 2) throw DomainError("need at least two samples per stroke");
}

}  // namespace detail

// Resolves N(C(i, j, u_k), i) for the current geometry.
inline NearestAssignment compute_nearest_assignment(const SketchAnimation& anim,
                                                    const TrackSet& tracks, int n_p) {
  detail::check_consistency_inputs(anim, tracks, n_p);
  const detail::FrameEvaluation eval(anim);
  const auto u = detail::sample_parameters(n_p);
  NearestAssignment out(anim.num_frames(), anim.num_strokes(), static_cast<std::size_t>(n_p));
  for (std::size_t j = 0; j < anim.num_strokes(); ++j) {
    const auto rows = detail::bezier_rows(anim.strokes()[j].curve_degree(), u);
    for (std::size_t i = 0; i < anim.num_frames(); ++i) {
      for (std::size_t k = 0; k < u.size(); ++k) {
        out.at(i, j, k) = static_cast<std::uint32_t>(tracks.nearest_index(eval.curve_point(j, rows[k], i), i));
      }
    }
  }
  return out;
}

// L_cons = sum_i sum_j (1/N_p) sum_k (1/N_f) sum_t |T(C(i,j,u_k), i, t) - C(t,j,u_k)|^2 with
// the nearest-sample assignment held fixed. frame_order permutes the anchor frames i.
inline LossValue consistency_loss_grad_frozen(const SketchAnimation& anim, const TrackSet& tracks,
                                              int n_p, const NearestAssignment& assignment,
                                              std::span<const std::size_t> frame_order = {}) {
  detail::check_consistency_inputs(anim, tracks, n_p);
  const std::size_t nf = anim.num_frames();
  const auto np = static_cast<std::size_t>(n_p);
  if (assignment.frames() != nf || assignment.strokes() != anim.num_strokes() ||
      assignment.samples() != np) {
    throw ValidationError("nearest assignment does not match the animation");
  }
  std::vector<std::size_t> order(frame_order.begin(), frame_order.end());
  if (order.empty()) {
    order.resize(nf);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else if (order.size() != nf) {
    throw ValidationError("frame order must list every frame once");
  }

  const detail::FrameEvaluation eval(anim);
  const auto u = detail::sample_parameters(n_p);
  const auto offsets = stroke_parameter_offsets(anim);
  const double w = 1.0 / (static_cast<double>(np) * static_cast<double>(nf));

  LossValue out{0.0, std::vector<double>(parameter_count(anim), 0.0)};
  std::vector<Vec2> points(nf), point_grad(nf);
  for (std::size_t j = 0; j < anim.num_strokes(); ++j) {
    const auto rows = detail::bezier_rows(anim.strokes()[j].curve_degree(), u);
    std::vector<std::vector<Vec2>> control_grad(rows.front().size(), std::vector<Vec2>(nf));
    for (std::size_t k = 0; k < np; ++k) {
      for (std::size_t f = 0; f < nf; ++f) points[f] = eval.curve_point(j, rows[k], f);
      std::fill(point_grad.begin(), point_grad.end(), Vec2{});
      for (std::size_t i : order) {
        const std::size_t s = assignment.at(i, j, k);
        const auto& track = tracks.points()[s].coords;
        const Vec2 anchor = points[i] - track[i];
        for (std::size_t t = 0; t < nf; ++t) {
          const Vec2 r = anchor + track[t] - points[t];
          out.value += w * squared_norm(r);
          const Vec2 g = 2.0 * w * r;
          point_grad[i] += g;
          point_grad[t] -= g;
        }
      }
      for (std::size_t c = 0; c < rows[k].size(); ++c) {
        for (std::size_t f = 0; f < nf; ++f) control_grad[c][f] += rows[k][c] * point_grad[f];
      }
    }
    eval.backprop_controls(j, control_grad, out.gradient, offsets[j]);
  }
  return out;
}

inline LossValue consistency_loss_grad(const SketchAnimation& anim, const TrackSet& tracks,
                                       int n_p = kDefaultSamplesPerStroke) {
  return consistency_loss_grad_frozen(anim, tracks, n_p,
                                      compute_nearest_assignment(anim, tracks, n_p));
}

// Per stroke, one target position per frame.
using StrokeTargets = std::vector<std::vector<Vec2>>;

// sum_i sum_j |C(i, j, 0.5) - target_{j,i}|^2 / (N_f N_s).
inline LossValue attachment_loss_grad(const SketchAnimation& anim, const StrokeTargets& targets) {
  if (targets.size() != anim.num_strokes()) {
    throw ValidationError("attachment: " + std::to_string(targets.size()) + " targets for " +
                          std::to_string(anim.num_strokes()) + " strokes");
  }
  const std::size_t nf = anim.num_frames();
  for (const auto& t : targets) {
    if (t.size() != nf) throw ValidationError("attachment: target length differs from frame count");
  }
  const detail::FrameEvaluation eval(anim);
  const auto offsets = stroke_parameter_offsets(anim);
  const double w = 1.0 / (static_cast<double>(nf) * static_cast<double>(anim.num_strokes()));
  const double mid[1] = {0.5};

  LossValue out{0.0, std::vector<double>(parameter_count(anim), 0.0)};
  for (std::size_t j = 0; j < anim.num_strokes(); ++j) {
    const auto row = detail::bezier_rows(anim.strokes()[j].curve_degree(), mid).front();
    std::vector<std::vector<Vec2>> control_grad(row.size(), std::vector<Vec2>(nf));
    for (std::size_t f = 0; f < nf; ++f) {
      const Vec2 r = eval.curve_point(j, row, f) - targets[j][f];
      out.value += w * squared_norm(r);
      const Vec2 g = 2.0 * w * r;
      for (std::size_t c = 0; c < row.size(); ++c) control_grad[c][f] += row[c] * g;
    }
    eval.backprop_controls(j, control_grad, out.gradient, offsets[j]);
  }
  return out;
}

struct TotalLoss {
  LossBreakdown breakdown;
  std::vector<double> gradient;
};

// Weighted sum with the nearest-sample assignment fixed; zero-weight terms are not evaluated.
inline TotalLoss total_loss_frozen(const SketchAnimation& anim, const TrackSet& tracks,
                                   const StrokeTargets& targets, const LossWeights& weights,
                                   int n_p, const NearestAssignment* assignment,
                                   const LossPlugins& plugins = {}) {
  weights.validate();
  TotalLoss out{{}, std::vector<double>(parameter_count(anim), 0.0)};
  auto accumulate = [&](double weight, const std::vector<double>& g) {
    for (std::size_t k = 0; k < g.size(); ++k) out.gradient[k] += weight * g[k];
  };
  if (weights.w_s > 0.0) {
    const auto att = attachment_loss_grad(anim, targets);
    out.breakdown.attachment = att.value;
    accumulate(weights.w_s, att.gradient);
  }
  if (weights.w_c > 0.0) {
    const auto cons = assignment ? consistency_loss_grad_frozen(anim, tracks, n_p, *assignment)
                                 : consistency_loss_grad(anim, tracks, n_p);
    out.breakdown.consistency = cons.value;
    accumulate(weights.w_c, cons.gradient);
  }
  if (weights.w_g > 0.0) {
    if (!plugins.geometry) throw ValidationError("w_g > 0 needs a geometry loss plugin");
    std::vector<double> g(out.gradient.size(), 0.0);
    out.breakdown.geometry = plugins.geometry->evaluate(anim, g);
    accumulate(weights.w_g, g);
  }
  out.breakdown.total = weights.w_s * out.breakdown.attachment +
                        weights.w_c * out.breakdown.consistency +
                        weights.w_g * out.breakdown.geometry;
  return out;
}

inline TotalLoss total_loss(const SketchAnimation& anim, const TrackSet& tracks,
                            const StrokeTargets& targets, const LossWeights& weights,
                            int n_p = kDefaultSamplesPerStroke, const LossPlugins& plugins = {}) {
  return total_loss_frozen(anim, tracks, targets, weights, n_p, nullptr, plugins);
}

struct OptimizationResult {
  SketchAnimation animation;
  LossBreakdown breakdown;  // final values plus the logged history
};

// Adaptive first/second moment descent over all trajectory coefficients. The nearest-sample
// assignment is refreshed once per iteration.
inline OptimizationResult optimize_animation(
    SketchAnimation anim, const TrackSet& tracks, const StrokeTargets& targets,
    const LossWeights& weights, const OptimConfig& config, const LossPlugins& plugins = {},
    const std::function<void(const HistoryEntry&)>& on_log = {}) {
  config.validate();
  weights.validate();
  if (weights.w_c > 0.0) detail::check_consistency_inputs(anim, tracks, config.n_p);

  std::vector<double> params = flatten_parameters(anim);
  std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0);
  OptimizationResult result;
  auto evaluate = [&](std::size_t iteration) {
    std::optional<NearestAssignment> assignment;
    if (weights.w_c > 0.0) assignment = compute_nearest_assignment(anim, tracks, config.n_p);
    auto loss = total_loss_frozen(anim, tracks, targets, weights, config.n_p,
                                  assignment ? &*assignment : nullptr, plugins);
    const bool finite = std::isfinite(loss.breakdown.total) &&
                        std::all_of(loss.gradient.begin(), loss.gradient.end(),
                                    [](double g) { return std::isfinite(g); });
    if (!finite) {
      throw DivergenceError("optimization diverged at iteration " + std::to_string(iteration),
                            iteration);
    }
    return loss;
  };
  auto log = [&](std::size_t iteration, const LossBreakdown& b) {
    HistoryEntry e{iteration, b.total, b.consistency, b.attachment};
    result.breakdown.history.push_back(e);
    if (on_log) on_log(e);
  };

  double decay1 = 1.0, decay2 = 1.0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const auto loss = evaluate(it);
    if (it % config.log_every == 0) log(it, loss.breakdown);
    decay1 *= config.moment_decay_1;
    decay2 *= config.moment_decay_2;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double g = loss.gradient[k];
      m1[k] = config.moment_decay_1 * m1[k] + (1.0 - config.moment_decay_1) * g;
      m2[k] = config.moment_decay_2 * m2[k] + (1.0 - config.moment_decay_2) * g * g;
      const double m1_hat = m1[k] / (1.0 - decay1);
      const double m2_hat = m2[k] / (1.0 - decay2);
      params[k] -= config.step_size * m1_hat / (std::sqrt(m2_hat) + config.epsilon);
    }
    assign_parameters(anim, params);
  }
  const auto final_loss = evaluate(config.iterations);
  auto history = std::move(result.breakdown.history);
  result.breakdown = final_loss.breakdown;
  result.breakdown.history = std::move(history);
  log(config.iterations, result.breakdown);
  result.animation = std::move(anim);
  return result;
}

inline std::string history_to_csv(const std::vector<HistoryEntry>& history) {
  std::string out = "iteration,total,consistency,attachment\n";
  char buf[128];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e.iteration, e.total, e.consistency,
                  e.attachment);
    out += buf;
  }
  return out;
}

inline constexpr std::size_t kFullGradientCheckLimit = 2000;

// Worst |fd - analytic| / max(1, |fd|, |analytic|) over central differences, with the
// nearest-sample assignment frozen at the unperturbed geometry. Small problems check every
// coordinate, larger ones a fixed pseudo-random 5% subset.
inline double finite_difference_check(const SketchAnimation& anim, const TrackSet& tracks,
                                      const StrokeTargets& targets, const LossWeights& weights,
                                      int n_p, double step = 1e-4, const LossPlugins& plugins = {}) {
  if (!(step > 0.0)) throw DomainError("finite difference step must be positive");
  if (weights.w_s == 0.0 && weights.w_g == 0.0 && weights.w_c == 0.0) return 0.0;
  std::optional<NearestAssignment> assignment;
  if (weights.w_c > 0.0) assignment = compute_nearest_assignment(anim, tracks, n_p);
  const auto* frozen = assignment ? &*assignment : nullptr;
  const auto analytic = total_loss_frozen(anim, tracks, targets, weights, n_p, frozen, plugins);

  const std::vector<double> base = flatten_parameters(anim);
  std::vector<std::size_t> coords(base.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (coords.size() > kFullGradientCheckLimit) {
    std::vector<std::size_t> subset;
    const std::size_t count = std::max<std::size_t>(1, coords.size() / 20);
    std::mt19937_64 rng(0x5eedULL);
    std::sample(coords.begin(), coords.end(), std::back_inserter(subset), count, rng);
    coords = std::move(subset);
  }

  SketchAnimation probe = anim;
  std::vector<double> params = base;
  double worst = 0.0;
  for (std::size_t k : coords) {
    params[k] = base[k] + step;
    assign_parameters(probe, params);
    const double up = total_loss_frozen(probe, tracks, targets, weights, n_p, frozen, plugins).breakdown.total;
    params[k] = base[k] - step;
    assign_parameters(probe, params);
    const double down = total_loss_frozen(probe, tracks, targets, weights, n_p, frozen, plugins).breakdown.total;
    params[k] = base[k];
    const double fd = (up - down) / (2.0 * step);
    const double an = analytic.gradient[k];
    worst = std::max(worst, std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)}));
  }
  return worst;
}

}  // namespace dmt
