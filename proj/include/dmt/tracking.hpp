#pragma once

// Sparse point tracks: storage, nearest-sample queries, motion weights, the RBF
// motion heatmap and the sparse-to-dense transfer T(p, i, t).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dmt/error.hpp"
#include "dmt/grid.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

struct TrackedPoint {
  int id = 0;
  std::vector<Vec2> coords;  // one position per frame

  friend bool operator==(const TrackedPoint&, const TrackedPoint&) = default;
};

namespace detail {

// Uniform bucket grid over the positions of one frame.
class FrameIndex {
 public:
  FrameIndex() = default;

  FrameIndex(std::span<const TrackedPoint> points, std::size_t frame) {
    lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const auto& p : points) {
      const Vec2 q = p.coords[frame];
      lo_.x = std::min(lo_.x, q.x);
      lo_.y = std::min(lo_.y, q.y);
      hi.x = std::max(hi.x, q.x);
      hi.y = std::max(hi.y, q.y);
    }
    hi_ = hi;
    const double w = hi.x - lo_.x, h = hi.y - lo_.y;
    const double n = static_cast<double>(points.size());
    cell_ = std::sqrt(std::max(w * h, 0.0) / n);
    if (!(cell_ > 0.0)) cell_ = std::max({w, h, 1.0}) / std::max(1.0, std::sqrt(n));
    cols_ = static_cast<std::size_t>(w / cell_) + 1;
    rows_ = static_cast<std::size_t>(h / cell_) + 1;

    std::vector<std::uint32_t> counts(cols_ * rows_ + 1, 0);
    std::vector<std::size_t> cell_of(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      cell_of[k] = cell_id(points[k].coords[frame]);
      ++counts[cell_of[k] + 1];
    }
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    start_ = counts;
    items_.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      items_[counts[cell_of[k]]++] = static_cast<std::uint32_t>(k);
    }
  }

  // Index of the nearest point; equal distances resolve to the lowest id.
  std::size_t nearest(std::span<const TrackedPoint> points, std::size_t frame, Vec2 p) const {
    const Vec2 q{std::clamp(p.x, lo_.x, hi_.x), std::clamp(p.y, lo_.y, hi_.y)};
    const auto cx = static_cast<long>(column(q.x));
    const auto cy = static_cast<long>(row(q.y));
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    bool found = false;
    const long max_ring = static_cast<long>(std::max(cols_, rows_));
    for (long r = 0; r <= max_ring; ++r) {
      for (long y = cy - r; y <= cy + r; ++y) {
        if (y < 0 || y >= static_cast<long>(rows_)) continue;
        const bool edge_row = (y == cy - r || y == cy + r);
        for (long x = cx - r; x <= cx + r; x += (edge_row ? 1 : 2 * r)) {
          if (x >= 0 && x < static_cast<long>(cols_)) {
            const std::size_t c = static_cast<std::size_t>(y) * cols_ + static_cast<std::size_t>(x);
            for (std::uint32_t s = start_[c]; s < start_[c + 1]; ++s) {
              const std::size_t k = items_[s];
              const double d2 = squared_norm(points[k].coords[frame] - p);
              if (!found || d2 < best_d2 || (d2 == best_d2 && points[k].id < points[best].id)) {
                best_d2 = d2;
                best = k;
                found = true;
              }
            }
          }
          if (r == 0) break;
        }
      }
      // Unvisited cells lie more than r cells from q on some axis; one cell of slack
      // absorbs rounding in the bucket assignment.
      const double bound = static_cast<double>(r - 1) * cell_;
      if (found && r >= 2 && best_d2 < bound * bound) break;
    }
    return best;
  }

 private:
  std::size_t column(double x) const {
    const auto c = static_cast<std::size_t>(std::max(0.0, (x - lo_.x) / cell_));
    return std::min(c, cols_ - 1);
  }
  std::size_t row(double y) const {
    const auto c = static_cast<std::size_t>(std::max(0.0, (y - lo_.y) / cell_));
    return std::min(c, rows_ - 1);
  }
  std::size_t cell_id(Vec2 v) const { return row(v.y) * cols_ + column(v.x); }

  Vec2 lo_, hi_;
  double cell_ = 1.0;
  std::size_t cols_ = 1, rows_ = 1;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> items_;
};

}  // namespace detail

// Immutable set of tracked points; per-frame spatial indices are built on construction.
class TrackSet {
 public:
  TrackSet() = default;

  TrackSet(std::size_t num_frames, std::vector<TrackedPoint> points)
      : num_frames_(num_frames), points_(std::move(points)) {
    if (points_.empty()) throw ValidationError("track set has no points");
    if (num_frames_ < 1) throw ValidationError("track set needs at least one frame");
    for (std::size_t k = 0; k < points_.size(); ++k) {
      const auto& p = points_[k];
      if (p.coords.size() != num_frames_) {
        throw ValidationError("track " + std::to_string(p.id) + " has " +
                              std::to_string(p.coords.size()) + " frames, expected " +
                              std::to_string(num_frames_));
      }
      for (const auto& c : p.coords) {
        if (!is_finite(c)) {
          throw ValidationError("track " + std::to_string(p.id) + " has a non-finite coordinate");
        }
      }
      if (!by_id_.emplace(p.id, k).second) {
        throw ValidationError("duplicate track id " + std::to_string(p.id));
      }
    }
    index_.reserve(num_frames_);
    for (std::size_t f = 0; f < num_frames_; ++f) index_.emplace_back(points_, f);
  }

  std::size_t num_frames() const noexcept { return num_frames_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const TrackedPoint> points() const noexcept { return points_; }

  std::size_t index_of(int id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) throw LookupError("unknown track id " + std::to_string(id));
    return it->second;
  }

  const TrackedPoint& point(int id) const { return points_[index_of(id)]; }

  Vec2 position(std::size_t point_index, std::size_t frame) const {
    return points_[point_index].coords[frame];
  }

  // Index (not id) of the nearest point in the given frame.
  std::size_t nearest_index(Vec2 p, std::size_t frame) const {
    check_frame(frame);
    return index_[frame].nearest(points_, frame, p);
  }

  void check_frame(std::size_t frame) const {
    if (frame >= num_frames_) {
      throw DomainError("frame " + std::to_string(frame) + " out of range [0," +
                        std::to_string(num_frames_) + ")");
    }
  }

  friend bool operator==(const TrackSet& a, const TrackSet& b) {
    return a.num_frames_ == b.num_frames_ && a.points_ == b.points_;
  }

 private:
  std::size_t num_frames_ = 0;
  std::vector<TrackedPoint> points_;
  std::unordered_map<int, std::size_t> by_id_;
  std::vector<detail::FrameIndex> index_;
};

// Id of the tracked point nearest to p in frame i (lowest id on ties).
inline int nearest_sample(Vec2 p, std::size_t frame, const TrackSet& tracks) {
  return tracks.points()[tracks.nearest_index(p, frame)].id;
}

// Linear scan; kept as the reference for the indexed query.
inline int nearest_sample_brute_force(Vec2 p, std::size_t frame, const TrackSet& tracks) {
  tracks.check_frame(frame);
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_id = 0;
  bool found = false;
  for (const auto& pt : tracks.points()) {
    const double d2 = squared_norm(pt.coords[frame] - p);
    if (!found || d2 < best_d2 || (d2 == best_d2 && pt.id < best_id)) {
      best_d2 = d2;
      best_id = pt.id;
      found = true;
    }
  }
  return best_id;
}

// T(p, i, t) = p - N(p, i) + T_R(N(p, i), t).
inline Vec2 transfer_point(Vec2 p, std::size_t from_frame, std::size_t to_frame,
                           const TrackSet& tracks) {
  tracks.check_frame(to_frame);
  tracks.check_frame(from_frame);
  if (from_frame == to_frame) return p;
  const std::size_t k = tracks.nearest_index(p, from_frame);
  return p - tracks.position(k, from_frame) + tracks.position(k, to_frame);
}

// V_m(j) = sqrt(sum_i |TRACK_{i,j} - TRACK_{i-1,j}|).
inline double motion_weight(const TrackSet& tracks, int id) {
  const auto& coords = tracks.point(id).coords;
  double path = 0.0;
  for (std::size_t i = 1; i < coords.size(); ++i) path += distance(coords[i], coords[i - 1]);
  return std::sqrt(path);
}

struct MotionHeatmap {
  ScalarGrid values;  // in [0,1]
};

// Shepard-normalized Gaussian RBF of the motion weights sampled at pixel centres, then
// min-max normalized. A constant field normalizes to all zeros.
inline MotionHeatmap build_motion_heatmap(const TrackSet& tracks, std::size_t width,
                                          std::size_t height, double bandwidth,
                                          std::size_t anchor_frame = 0) {
  if (width < 1 || height < 1) throw DomainError("heatmap dimensions must be positive");
  if (!(bandwidth > 0.0)) throw DomainError("heatmap bandwidth must be positive");
  if (tracks.size() == 0) throw ValidationError("no tracked points");
  tracks.check_frame(anchor_frame);

  std::vector<Vec2> sites;
  std::vector<double> weights;
  for (const auto& p : tracks.points()) {
    sites.push_back(p.coords[anchor_frame]);
    weights.push_back(motion_weight(tracks, p.id));
  }
  const double inv_two_var = 1.0 / (2.0 * bandwidth * bandwidth);
  ScalarGrid raw(width, height);
  std::vector<double> expo(sites.size());
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const Vec2 c{static_cast<double>(x) + 0.5, static_cast<double>(y) + 0.5};
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < sites.size(); ++j) {
        expo[j] = -squared_norm(c - sites[j]) * inv_two_var;
        top = std::max(top, expo[j]);
      }
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < sites.size(); ++j) {
        const double k = std::exp(expo[j] - top);
        num += weights[j] * k;
        den += k;
      }
      raw.at(x, y) = num / den;
    }
  }
  const auto [mn, mx] = std::minmax_element(raw.data.begin(), raw.data.end());
  const double lo = *mn, span = *mx - *mn;
  MotionHeatmap out{ScalarGrid(width, height, 0.0)};
  if (span > 0.0) {
    for (std::size_t k = 0; k < raw.size(); ++k) {
      out.values.data[k] = std::clamp((raw.data[k] - lo) / span, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace dmt
