#pragma once

// Track files.
//   JSON: {"num_frames": N, "points": [{"id": int, "xy": [[x, y], ...]}]}
//   CSV:  header frame,point_id,x,y then one row per (frame, point)
// Extra per-point fields / columns (e.g. visibility flags) are accepted and ignored.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dmt/error.hpp"
#include "dmt/format.hpp"
#include "dmt/tracking.hpp"

namespace dmt {

enum class TrackFormat { Json, Csv };

inline TrackFormat track_format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return TrackFormat::Csv;
  if (ext == ".json") return TrackFormat::Json;
  throw ValidationError("cannot infer track format from '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace detail {

inline bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace detail

inline TrackSet parse_tracks_json(std::string_view text) {
  if (detail::is_blank(text)) throw ValidationError("no points");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("track JSON: ") + e.what());
  }
  try {
    const auto num_frames = doc.at("num_frames").get<long long>();
    if (num_frames < 1) throw ValidationError("track JSON: num_frames must be positive");
    const auto& pts = doc.at("points");
    if (!pts.is_array()) throw ParseError("track JSON: 'points' must be an array");
    if (pts.empty()) throw ValidationError("no points");
    std::vector<TrackedPoint> points;
    points.reserve(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      TrackedPoint p;
      p.id = pts[k].at("id").get<int>();
      for (const auto& xy : pts[k].at("xy")) {
        if (!xy.is_array() || xy.size() != 2) {
          throw ParseError("track JSON: point " + std::to_string(p.id) +
                           " has a coordinate that is not an [x, y] pair");
        }
        p.coords.push_back({xy[0].get<double>(), xy[1].get<double>()});
      }
      points.push_back(std::move(p));
    }
    return TrackSet(static_cast<std::size_t>(num_frames), std::move(points));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("track JSON: ") + e.what());
  }
}

inline TrackSet parse_tracks_csv(std::string_view text) {
  if (detail::is_blank(text)) throw ValidationError("no points");
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
  };

  std::getline(in, line);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "frame" || header[1] != "point_id" || header[2] != "x" ||
      header[3] != "y") {
    throw ParseError("track CSV line 1: expected header frame,point_id,x,y");
  }

  std::map<int, std::map<long long, Vec2>> by_id;
  std::size_t rows = 0;
  long long max_frame = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    const auto f = split(line);
    const std::string ctx = "track CSV line " + std::to_string(line_no);
    if (f.size() < 4) throw ParseError(ctx + ": expected at least 4 fields");
    const long long frame = parse_integer(f[0], ctx + " field frame");
    const auto id = static_cast<int>(parse_integer(f[1], ctx + " field point_id"));
    const Vec2 xy{parse_double(f[2], ctx + " field x"), parse_double(f[3], ctx + " field y")};
    if (frame < 0) throw ParseError(ctx + ": negative frame index");
    if (!by_id[id].emplace(frame, xy).second) {
      throw ValidationError(ctx + ": duplicate row for point " + std::to_string(id) + " frame " +
                            std::to_string(frame));
    }
    max_frame = std::max(max_frame, frame);
    ++rows;
  }
  if (by_id.empty()) throw ValidationError("no points");
  if (rows % by_id.size() != 0) {
    throw ValidationError("track CSV: " + std::to_string(rows) + " rows is not divisible by " +
                          std::to_string(by_id.size()) + " points");
  }
  const auto num_frames = static_cast<std::size_t>(max_frame + 1);
  std::vector<TrackedPoint> points;
  for (auto& [id, frames] : by_id) {
    if (frames.size() != num_frames) {
      throw ValidationError("track " + std::to_string(id) + " has " +
                            std::to_string(frames.size()) + " frames, expected " +
                            std::to_string(num_frames));
    }
    TrackedPoint p{id, {}};
    for (auto& [frame, xy] : frames) p.coords.push_back(xy);
    points.push_back(std::move(p));
  }
  return TrackSet(num_frames, std::move(points));
}

inline TrackSet load_tracks(const std::filesystem::path& path, TrackFormat format) {
  const std::string text = read_text_file(path);
  return format == TrackFormat::Json ? parse_tracks_json(text) : parse_tracks_csv(text);
}

inline TrackSet load_tracks(const std::filesystem::path& path) {
  return load_tracks(path, track_format_for(path));
}

inline std::string tracks_to_json(const TrackSet& tracks) {
  nlohmann::json doc;
  doc["num_frames"] = tracks.num_frames();
  auto& pts = doc["points"] = nlohmann::json::array();
  for (const auto& p : tracks.points()) {
    nlohmann::json xy = nlohmann::json::array();
    for (const auto& c : p.coords) xy.push_back({c.x, c.y});
    pts.push_back({{"id", p.id}, {"xy", std::move(xy)}});
  }
  return doc.dump() + "\n";
}

inline std::string tracks_to_csv(const TrackSet& tracks) {
  std::string out = "frame,point_id,x,y\n";
  for (std::size_t f = 0; f < tracks.num_frames(); ++f) {
    for (const auto& p : tracks.points()) {
      out += std::to_string(f) + "," + std::to_string(p.id) + "," + format_exact(p.coords[f].x) +
             "," + format_exact(p.coords[f].y) + "\n";
    }
  }
  return out;
}

}  // namespace dmt
