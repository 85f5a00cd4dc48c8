#pragma once

// SVG rendering of a SketchAnimation: single frames, per-frame file sets and one animated
// file whose path data is keyed over a FrameRatePlan.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmt/bernstein.hpp"
#include "dmt/error.hpp"
#include "dmt/format.hpp"
#include "dmt/track_io.hpp"
#include "dmt/trajectory.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

struct FrameRatePlan {
  double input_fps = 0.0;
  double output_fps = 0.0;
  std::vector<double> output_frame_times;

  std::size_t size() const noexcept { return output_frame_times.size(); }
  double duration_seconds() const { return static_cast<double>(size()) / output_fps; }
};

// Output count round((N_f - 1) * out / in) + 1, never fewer than two keys.
inline FrameRatePlan resample_framerate(const SketchAnimation& anim, double input_fps,
                                        double output_fps) {
  if (!(input_fps > 0.0) || !(output_fps > 0.0) || !std::isfinite(input_fps) ||
      !std::isfinite(output_fps)) {
    throw DomainError("frame rates must be positive");
  }
  const double span = static_cast<double>(anim.num_frames() - 1) * output_fps / input_fps;
  const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(span)) + 1);
  FrameRatePlan plan{input_fps, output_fps, {}};
  plan.output_frame_times.resize(count);
  for (std::size_t k = 0; k < count; ++k) plan.output_frame_times[k] = frame_time(k, count);
  return plan;
}

inline FrameRatePlan identity_plan(const SketchAnimation& anim, double fps) {
  return resample_framerate(anim, fps, fps);
}

namespace detail {

inline std::string svg_point(Vec2 p) { return format_fixed(p.x) + " " + format_fixed(p.y); }

inline Vec2 curve_tangent(std::span<const Vec2> ctrl, double u) {
  const int m = static_cast<int>(ctrl.size()) - 1;
  const auto row = stable_basis_row(BasisKind::Bernstein, m - 1, u);
  Vec2 d;
  for (int c = 0; c < m; ++c) d += row.values[c] * (ctrl[c + 1] - ctrl[c]);
  return static_cast<double>(m) * d;
}

}  // namespace detail

// Path data for one stroke at time t. Degrees 1-3 map to L, Q and C commands; higher degrees
// become m cubic segments matching position and tangent at u = k/m.
inline std::string stroke_path_data(const Stroke& stroke, double t) {
  const auto ctrl = control_points_at(stroke, t);
  const int m = stroke.curve_degree();
  std::string d = "M " + detail::svg_point(ctrl.front());
  if (m <= 3) {
    d += m == 1 ? " L" : m == 2 ? " Q" : " C";
    for (std::size_t c = 1; c < ctrl.size(); ++c) d += " " + detail::svg_point(ctrl[c]);
    return d;
  }
  const double h = 1.0 / m;
  Vec2 p0 = ctrl.front();
  Vec2 d0 = detail::curve_tangent(ctrl, 0.0);
  for (int k = 1; k <= m; ++k) {
    const double u = static_cast<double>(k) / m;
    const Vec2 p1 = k == m ? ctrl.back() : bezier_point(ctrl, u);
    const Vec2 d1 = detail::curve_tangent(ctrl, u);
    d += " C " + detail::svg_point(p0 + (h / 3.0) * d0) + " " +
         detail::svg_point(p1 - (h / 3.0) * d1) + " " + detail::svg_point(p1);
    p0 = p1;
    d0 = d1;
  }
  return d;
}

namespace detail {

inline std::string svg_open(const Canvas& canvas) {
  const std::string w = format_exact(canvas.width), h = format_exact(canvas.height);
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w +
         "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
}

inline const char* kStrokeStyle = "fill=\"none\" stroke=\"black\" stroke-linecap=\"round\" stroke-linejoin=\"round\"";

}  // namespace detail

inline std::string frame_svg(const SketchAnimation& anim, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("frame time must lie in [0,1]");
  std::string out = detail::svg_open(anim.canvas());
  const std::string width = format_fixed(anim.width_at(t));
  for (const auto& s : anim.strokes()) {
    out += "  <path d=\"" + stroke_path_data(s, t) + "\" " + detail::kStrokeStyle +
           " stroke-width=\"" + width + "\"/>\n";
  }
  return out + "</svg>\n";
}

inline void export_frame_svg(const SketchAnimation& anim, double t, const std::filesystem::path& path) {
  write_text_file(path, frame_svg(anim, t));
}

inline std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.svg", index);
  return buf;
}

// One file per input frame, frame_00000.svg onwards. Returns the written paths.
inline std::vector<std::filesystem::path> export_frame_svgs(const SketchAnimation& anim,
                                                            const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < anim.num_frames(); ++i) {
    paths.push_back(dir / frame_file_name(i));
    export_frame_svg(anim, anim.frame_time(i), paths.back());
  }
  return paths;
}

inline std::string animated_svg(const SketchAnimation& anim, const FrameRatePlan& plan) {
  const auto& times = plan.output_frame_times;
  if (times.size() < 2 || times.front() != 0.0 || times.back() != 1.0) {
    throw ValidationError("frame plan must start at 0 and end at 1");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ValidationError("frame plan times must increase strictly");
  }
  if (!(plan.output_fps > 0.0)) throw ValidationError("frame plan output fps must be positive");

  std::string key_times;
  std::string widths;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k) {
      key_times += ";";
      widths += ";";
    }
    key_times += format_fixed(times[k]);
    widths += format_fixed(anim.width_at(times[k]));
  }
  const std::string timing = "dur=\"" + format_fixed(plan.duration_seconds()) +
                             "s\" repeatCount=\"indefinite\" calcMode=\"linear\" keyTimes=\"" +
                             key_times + "\"";

  std::string out = detail::svg_open(anim.canvas());
  for (const auto& s : anim.strokes()) {
    std::string values;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (k) values += ";";
      values += stroke_path_data(s, times[k]);
    }
    out += "  <path d=\"" + stroke_path_data(s, 0.0) + "\" " + detail::kStrokeStyle +
           " stroke-width=\"" + format_fixed(anim.width_at(0.0)) + "\">\n";
    out += "    <animate attributeName=\"d\" " + timing + " values=\"" + values + "\"/>\n";
    out += "    <animate attributeName=\"stroke-width\" " + timing + " values=\"" + widths + "\"/>\n";
    out += "  </path>\n";
  }
  return out + "</svg>\n";
}

inline void export_animated_svg(const SketchAnimation& anim, const FrameRatePlan& plan,
                                const std::filesystem::path& path) {
  write_text_file(path, animated_svg(anim, plan));
}

// Reading SVG produced above back into numbers.

// Every quoted value of attribute `name` in document order.
inline std::vector<std::string> svg_attribute_values(std::string_view svg, std::string_view name) {
  std::vector<std::string> out;
  const std::string needle = " " + std::string(name) + "=\"";
  std::size_t pos = 0;
  while ((pos = svg.find(needle, pos)) != std::string_view::npos) {
    pos += needle.size();
    const auto end = svg.find('"', pos);
    if (end == std::string_view::npos) throw ParseError("SVG: unterminated attribute " + std::string(name));
    out.emplace_back(svg.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

inline std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(sep, start);
    parts.emplace_back(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) return parts;
    start = end + 1;
  }
}

// Coordinate pairs of a path in order of appearance; command letters are skipped.
inline std::vector<Vec2> parse_path_points(std::string_view d) {
  std::vector<double> nums;
  std::size_t pos = 0;
  while (pos < d.size()) {
    const char ch = d[pos];
    if (ch == ' ' || std::isalpha(static_cast<unsigned char>(ch))) {
      ++pos;
      continue;
    }
    auto end = d.find(' ', pos);
    if (end == std::string_view::npos) end = d.size();
    nums.push_back(parse_double(d.substr(pos, end - pos), "SVG path"));
    pos = end;
  }
  if (nums.size() % 2) throw ParseError("SVG path: odd number of coordinates");
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < nums.size(); k += 2) pts.push_back({nums[k], nums[k + 1]});
  return pts;
}

// Positions in a parsed path that lie on the curve (segment endpoints).
inline std::vector<Vec2> path_on_curve_points(std::span<const Vec2> pts, int curve_degree) {
  const std::size_t step = curve_degree <= 3 ? static_cast<std::size_t>(curve_degree) : 3;
  std::vector<Vec2> out;
  for (std::size_t k = 0; k < pts.size(); k += step) out.push_back(pts[k]);
  return out;
}

// u values of the on-curve points for a stroke of the given degree.
inline std::vector<double> path_on_curve_parameters(int curve_degree) {
  if (curve_degree <= 3) return {0.0, 1.0};
  std::vector<double> u;
  for (int k = 0; k <= curve_degree; ++k) u.push_back(static_cast<double>(k) / curve_degree);
  return u;
}

}  // namespace dmt
