#pragma once

// Model file (JSON, format_version 1):
//   {"format_version": 1,
//    "canvas": {"width": W, "height": H},
//    "num_frames": N,
//    "widths": [w_0, ..., w_{N-1}],
//    "strokes": [{"basis": "bernstein" | "power", "curve_degree": m, "trajectory_degree": n,
//                 "control_points": [[[x, y] x (n+1)] x (m+1)]}],
//    "attachment_targets": [[[x, y] x N] x N_s]}      (optional)
// Doubles are written in shortest round-trip form, so coefficients survive save/load exactly.

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dmt/bernstein.hpp"
#include "dmt/error.hpp"
#include "dmt/optimize.hpp"
#include "dmt/track_io.hpp"
#include "dmt/trajectory.hpp"

namespace dmt {

inline constexpr int kModelFormatVersion = 1;

struct ModelDocument {
  int format_version = kModelFormatVersion;
  SketchAnimation animation;
  StrokeTargets attachment_targets;  // empty when the file carries none
  std::vector<std::string> warnings;
};

namespace detail {

inline nlohmann::ordered_json points_to_json(std::span<const Vec2> pts) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

inline std::vector<Vec2> points_from_json(const nlohmann::json& arr, const std::string& what) {
  if (!arr.is_array()) throw ParseError("model: " + what + " must be an array");
  std::vector<Vec2> pts;
  pts.reserve(arr.size());
  for (const auto& xy : arr) {
    if (!xy.is_array() || xy.size() != 2 || !xy[0].is_number() || !xy[1].is_number()) {
      throw ParseError("model: " + what + " entries must be [x, y] number pairs");
    }
    pts.push_back({xy[0].get<double>(), xy[1].get<double>()});
  }
  return pts;
}

inline void warn_unknown(const nlohmann::json& obj, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>& warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) warnings.push_back("ignoring unknown field '" + where + it.key() + "'");
  }
}

}  // namespace detail

inline std::string model_to_json(const SketchAnimation& anim, const StrokeTargets& targets = {}) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["canvas"] = {{"width", anim.canvas().width}, {"height", anim.canvas().height}};
  doc["num_frames"] = anim.num_frames();
  doc["widths"] = std::vector<double>(anim.widths().begin(), anim.widths().end());
  auto strokes = nlohmann::ordered_json::array();
  for (const auto& s : anim.strokes()) {
    nlohmann::ordered_json js;
    js["basis"] = to_string(s.basis());
    js["curve_degree"] = s.curve_degree();
    js["trajectory_degree"] = s.trajectory_degree();
    auto controls = nlohmann::ordered_json::array();
    for (const auto& c : s.controls()) controls.push_back(detail::points_to_json(c.coeffs()));
    js["control_points"] = std::move(controls);
    strokes.push_back(std::move(js));
  }
  doc["strokes"] = std::move(strokes);
  if (!targets.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : targets) arr.push_back(detail::points_to_json(t));
    doc["attachment_targets"] = std::move(arr);
  }
  return doc.dump(1) + "\n";
}

inline ModelDocument parse_model(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  ModelDocument out;
  try {
    if (!doc.is_object()) throw ParseError("model: top level must be an object");
    const auto& version = doc.at("format_version");
    if (!version.is_number_integer()) throw ParseError("model: format_version must be an integer");
    out.format_version = version.get<int>();
    if (out.format_version > kModelFormatVersion) {
      throw UnsupportedVersionError("model format_version " + std::to_string(out.format_version) +
                                    " is newer than supported version " +
                                    std::to_string(kModelFormatVersion));
    }
    if (out.format_version < 1) throw ParseError("model: format_version must be >= 1");
    detail::warn_unknown(doc,
                         {"format_version", "canvas", "num_frames", "widths", "strokes",
                          "attachment_targets"},
                         "", out.warnings);

    const Canvas canvas{doc.at("canvas").at("width").get<double>(),
                        doc.at("canvas").at("height").get<double>()};
    const auto num_frames = doc.at("num_frames").get<std::size_t>();
    const auto widths = doc.at("widths").get<std::vector<double>>();
    std::vector<Stroke> strokes;
    const auto& js = doc.at("strokes");
    if (!js.is_array()) throw ParseError("model: strokes must be an array");
    for (std::size_t k = 0; k < js.size(); ++k) {
      const auto& s = js[k];
      const std::string where = "strokes[" + std::to_string(k) + "].";
      detail::warn_unknown(s, {"basis", "curve_degree", "trajectory_degree", "control_points"},
                           where, out.warnings);
      const auto basis = basis_kind_from_string(s.at("basis").get<std::string>());
      const int m = s.at("curve_degree").get<int>();
      const int n = s.at("trajectory_degree").get<int>();
      const auto& cps = s.at("control_points");
      if (!cps.is_array() || cps.size() != static_cast<std::size_t>(m) + 1) {
        throw ParseError("model: " + where + "control_points must hold curve_degree+1 trajectories");
      }
      std::vector<TrajectoryPoly> controls;
      for (const auto& c : cps) {
        auto coeffs = detail::points_from_json(c, where + "control_points");
        if (coeffs.size() != static_cast<std::size_t>(n) + 1) {
          throw ParseError("model: " + where + "trajectory has " + std::to_string(coeffs.size()) +
                           " coefficients, expected trajectory_degree+1");
        }
        controls.emplace_back(basis, std::move(coeffs));
      }
      strokes.emplace_back(std::move(controls));
    }
    out.animation = SketchAnimation(std::move(strokes), num_frames, canvas, widths);
    if (doc.contains("attachment_targets")) {
      for (const auto& t : doc.at("attachment_targets")) {
        out.attachment_targets.push_back(detail::points_from_json(t, "attachment_targets"));
      }
      if (out.attachment_targets.size() != out.animation.num_strokes()) {
        throw ValidationError("model: attachment_targets must have one entry per stroke");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  return out;
}

inline ModelDocument save_model(const SketchAnimation& anim, const std::filesystem::path& path,
                                const StrokeTargets& targets = {}) {
  write_text_file(path, model_to_json(anim, targets));
  return {kModelFormatVersion, anim, targets, {}};
}

inline ModelDocument load_model_document(const std::filesystem::path& path) {
  return parse_model(read_text_file(path));
}

inline SketchAnimation load_model(const std::filesystem::path& path) {
  return load_model_document(path).animation;
}

}  // namespace dmt
