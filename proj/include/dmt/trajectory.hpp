#pragma once

// Differentiable motion trajectories: Bezier control points whose positions are
// polynomials in normalized time t in [0,1].

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmt/bernstein.hpp"
#include "dmt/error.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

inline constexpr int kDefaultCurveDegree = 3;

// Matches the frames -> degree pairing of the fitting benchmark (50 -> 24, 400 -> 199).
inline int default_trajectory_degree(std::size_t num_frames) {
  if (num_frames < 2) throw DomainError("need at least two frames");
  return static_cast<int>((num_frames + 1) / 2) - 1;
}

// Normalized time of frame i out of num_frames.
inline double frame_time(std::size_t i, std::size_t num_frames) {
  return static_cast<double>(i) / static_cast<double>(num_frames - 1);
}

// Motion of one control point: sum_i phi_i(t) * coeffs[i].
class TrajectoryPoly {
 public:
  TrajectoryPoly() : coeffs_(1) {}

  TrajectoryPoly(BasisKind basis, std::vector<Vec2> coeffs)
      : basis_(basis), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ValidationError("trajectory needs at least one coefficient");
    for (const auto& c : coeffs_) {
      if (!is_finite(c)) throw ValidationError("trajectory coefficients must be finite");
    }
  }

  static TrajectoryPoly constant(BasisKind basis, int degree, Vec2 value) {
    if (basis == BasisKind::Bernstein) {
      return {basis, std::vector<Vec2>(static_cast<std::size_t>(degree) + 1, value)};
    }
    std::vector<Vec2> c(static_cast<std::size_t>(degree) + 1);
    c[0] = value;
    return {basis, std::move(c)};
  }

  BasisKind basis() const noexcept { return basis_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Vec2> coeffs() const noexcept { return coeffs_; }
  std::span<Vec2> mutable_coeffs() noexcept { return coeffs_; }

  friend bool operator==(const TrajectoryPoly&, const TrajectoryPoly&) = default;

 private:
  BasisKind basis_ = BasisKind::Bernstein;
  std::vector<Vec2> coeffs_;
};

inline Vec2 combine(std::span<const double> weights, std::span<const Vec2> points) {
  Vec2 acc;
  for (std::size_t i = 0; i < points.size(); ++i) acc += weights[i] * points[i];
  return acc;
}

// The row used both for evaluation and as the coefficient Jacobian.
inline BasisRow trajectory_basis_row(const TrajectoryPoly& traj, double t,
                                     int log_switch_degree = kDefaultLogSwitchDegree) {
  return stable_basis_row(traj.basis(), traj.degree(), t, log_switch_degree);
}

inline Vec2 eval_trajectory(const TrajectoryPoly& traj, double t,
                            int log_switch_degree = kDefaultLogSwitchDegree) {
  const auto row = trajectory_basis_row(traj, t, log_switch_degree);
  return combine(row.values, traj.coeffs());
}

// d eval_trajectory / d coeffs[i], identical for both coordinates.
inline std::vector<double> coefficient_jacobian_row(const TrajectoryPoly& traj, double t) {
  return trajectory_basis_row(traj, t).values;
}

// Time derivative as a trajectory of one lower degree in the same basis.
inline TrajectoryPoly derivative(const TrajectoryPoly& traj) {
  const int n = traj.degree();
  const auto c = traj.coeffs();
  if (n == 0) return TrajectoryPoly(traj.basis(), {Vec2{}});
  std::vector<Vec2> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d[i] = traj.basis() == BasisKind::Bernstein ? double(n) * (c[i + 1] - c[i])
                                                : double(i + 1) * c[i + 1];
  }
  return {traj.basis(), std::move(d)};
}

// L1 norm of d P(t) / d coeffs: sum t^i for the power basis, identically 1 for Bernstein.
inline double sensitivity_l1(BasisKind kind, int n, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("sensitivity parameter must lie in [0,1]");
  if (n < 0) throw DomainError("degree must be nonnegative");
  switch (kind) {
    case BasisKind::Bernstein:
      return 1.0;
    case BasisKind::Power: {
      double sum = 0.0, p = 1.0;
      for (int i = 0; i <= n; ++i) {
        sum += p;
        p *= t;
      }
      return sum;
    }
  }
  return 0.0;
}

// Time-varying Bezier curve of degree m = control_trajectories.size() - 1.
class Stroke {
 public:
  Stroke() = default;

  explicit Stroke(std::vector<TrajectoryPoly> control_trajectories)
      : controls_(std::move(control_trajectories)) {
    if (controls_.size() < 2) throw ValidationError("stroke needs a curve degree of at least 1");
    for (const auto& c : controls_) {
      if (c.basis() != controls_.front().basis() || c.degree() != controls_.front().degree()) {
        throw ValidationError("stroke control trajectories must share basis and degree");
      }
    }
  }

  int curve_degree() const noexcept { return static_cast<int>(controls_.size()) - 1; }
  int trajectory_degree() const noexcept { return controls_.front().degree(); }
  BasisKind basis() const noexcept { return controls_.front().basis(); }
  std::span<const TrajectoryPoly> controls() const noexcept { return controls_; }
  std::span<TrajectoryPoly> mutable_controls() noexcept { return controls_; }

  friend bool operator==(const Stroke&, const Stroke&) = default;

 private:
  std::vector<TrajectoryPoly> controls_;
};

// Control point positions of the stroke at time t.
inline std::vector<Vec2> control_points_at(const Stroke& stroke, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("time must lie in [0,1]");
  std::vector<Vec2> pts;
  pts.reserve(stroke.controls().size());
  const auto row = stable_basis_row(stroke.basis(), stroke.trajectory_degree(), t);
  for (const auto& c : stroke.controls()) pts.push_back(combine(row.values, c.coeffs()));
  return pts;
}

inline Vec2 bezier_point(std::span<const Vec2> control_points, double u) {
  const auto row =
      stable_basis_row(BasisKind::Bernstein, static_cast<int>(control_points.size()) - 1, u);
  return combine(row.values, control_points);
}

inline Vec2 eval_curve_point(const Stroke& stroke, double u, double t) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("curve parameter u must lie in [0,1]");
  return bezier_point(control_points_at(stroke, t), u);
}

inline std::vector<Vec2> sample_stroke(const Stroke& stroke, double t, int num_points) {
  if (num_points < 2) throw DomainError("need at least two samples per stroke");
  const auto ctrl = control_points_at(stroke, t);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(num_points));
  for (int k = 0; k < num_points; ++k) {
    out.push_back(bezier_point(ctrl, static_cast<double>(k) / (num_points - 1)));
  }
  return out;
}

struct Canvas {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Canvas&, const Canvas&) = default;
};

// N_s strokes over N_f frames; frame i sits at t = i / (N_f - 1).
class SketchAnimation {
 public:
  SketchAnimation() = default;

  SketchAnimation(std::vector<Stroke> strokes, std::size_t num_frames, Canvas canvas,
                  std::vector<double> widths)
      : strokes_(std::move(strokes)),
        num_frames_(num_frames),
        canvas_(canvas),
        widths_(std::move(widths)) {
    if (strokes_.empty()) throw ValidationError("animation needs at least one stroke");
    if (num_frames_ < 2) throw ValidationError("animation needs at least two frames");
    if (widths_.size() != num_frames_) {
      throw ValidationError("width schedule has " + std::to_string(widths_.size()) +
                            " entries for " + std::to_string(num_frames_) + " frames");
    }
    for (double w : widths_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("widths must be finite and >= 0");
    }
    if (!(canvas_.width > 0.0 && canvas_.height > 0.0)) {
      throw ValidationError("canvas dimensions must be positive");
    }
  }

  std::span<const Stroke> strokes() const noexcept { return strokes_; }
  std::span<Stroke> mutable_strokes() noexcept { return strokes_; }
  std::size_t num_strokes() const noexcept { return strokes_.size(); }
  std::size_t num_frames() const noexcept { return num_frames_; }
  const Canvas& canvas() const noexcept { return canvas_; }
  std::span<const double> widths() const noexcept { return widths_; }

  double frame_time(std::size_t i) const { return dmt::frame_time(i, num_frames_); }

  // Width schedule linearly interpolated at continuous time t.
  double width_at(double t) const {
    const double pos = t * static_cast<double>(num_frames_ - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= num_frames_) return widths_.back();
    const double a = pos - static_cast<double>(lo);
    return (1.0 - a) * widths_[lo] + a * widths_[lo + 1];
  }

  friend bool operator==(const SketchAnimation&, const SketchAnimation&) = default;

 private:
  std::vector<Stroke> strokes_;
  std::size_t num_frames_ = 0;
  Canvas canvas_;
  std::vector<double> widths_;
};

// Number of scalar parameters (two per coefficient) across the whole animation.
inline std::size_t parameter_count(const SketchAnimation& anim) {
  std::size_t n = 0;
  for (const auto& s : anim.strokes()) {
    for (const auto& c : s.controls()) n += 2 * c.coeffs().size();
  }
  return n;
}

// Flat layout: stroke-major, then control point, then coefficient, then (x, y).
inline std::vector<double> flatten_parameters(const SketchAnimation& anim) {
  std::vector<double> out;
  out.reserve(parameter_count(anim));
  for (const auto& s : anim.strokes()) {
    for (const auto& c : s.controls()) {
      for (const auto& q : c.coeffs()) {
        out.push_back(q.x);
        out.push_back(q.y);
      }
    }
  }
  return out;
}

inline void assign_parameters(SketchAnimation& anim, std::span<const double> params) {
  if (params.size() != parameter_count(anim)) {
    throw ValidationError("parameter vector size does not match the animation");
  }
  std::size_t k = 0;
  for (auto& s : anim.mutable_strokes()) {
    for (auto& c : s.mutable_controls()) {
      for (auto& q : c.mutable_coeffs()) {
        q.x = params[k++];
        q.y = params[k++];
      }
    }
  }
}

// Offset of the first parameter of each stroke in the flat layout.
inline std::vector<std::size_t> stroke_parameter_offsets(const SketchAnimation& anim) {
  std::vector<std::size_t> offsets;
  offsets.reserve(anim.num_strokes());
  std::size_t k = 0;
  for (const auto& s : anim.strokes()) {
    offsets.push_back(k);
    for (const auto& c : s.controls()) k += 2 * c.coeffs().size();
  }
  return offsets;
}

}  // namespace dmt
