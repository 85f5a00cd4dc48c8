#pragma once

// Grayscale PGM (P2 ASCII / P5 binary, 8 or 16 bit) rescaled to [0,1], and the
// frame,area_pixels mask-area CSV.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dmt/error.hpp"
#include "dmt/format.hpp"
#include "dmt/grid.hpp"
#include "dmt/track_io.hpp"

namespace dmt {

namespace detail {

class PgmReader {
 public:
  explicit PgmReader(std::string_view data) : data_(data) {}

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("PGM: unexpected end of header");
    return std::string(data_.substr(start, pos_ - start));
  }

  long long number(const char* what) {
    return parse_integer(token(), std::string("PGM ") + what);
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      throw ParseError("PGM: missing separator before raster data");
    }
    ++pos_;
  }

  std::string_view rest() const { return data_.substr(pos_); }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ScalarGrid parse_pgm(std::string_view data) {
  detail::PgmReader reader(data);
  const std::string magic = reader.token();
  if (magic != "P5" && magic != "P2") throw ParseError("PGM: unsupported magic '" + magic + "'");
  const long long w = reader.number("width");
  const long long h = reader.number("height");
  const long long maxval = reader.number("maxval");
  if (w < 1 || h < 1) throw ParseError("PGM: dimensions must be positive");
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM: maxval must be in [1, 65535]");
  ScalarGrid grid(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (auto& v : grid.data) {
      const long long raw = reader.number("sample");
      if (raw < 0 || raw > maxval) throw ParseError("PGM: sample exceeds maxval");
      v = static_cast<double>(raw) * scale;
    }
    return grid;
  }
  reader.skip_single_space();
  const auto raster = reader.rest();
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  if (raster.size() < grid.size() * bytes) throw ParseError("PGM: truncated raster data");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    unsigned raw = static_cast<unsigned char>(raster[k * bytes]);
    if (bytes == 2) raw = (raw << 8) | static_cast<unsigned char>(raster[k * bytes + 1]);
    if (raw > maxval) throw ParseError("PGM: sample exceeds maxval");
    grid.data[k] = static_cast<double>(raw) * scale;
  }
  return grid;
}

inline ScalarGrid load_pgm(const std::filesystem::path& path) { return parse_pgm(read_text_file(path)); }

// Binary P5 encoding of a [0,1] grid.
inline std::string pgm_to_string(const ScalarGrid& grid, unsigned maxval = 255) {
  std::string out = "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) +
                    "\n" + std::to_string(maxval) + "\n";
  for (double v : grid.data) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (maxval > 255) out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xFF));
  }
  return out;
}

// frame,area_pixels with every frame 0..N-1 present exactly once.
inline std::vector<double> parse_mask_areas_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("frame,area_pixels", 0) != 0) {
    throw ParseError("mask CSV line 1: expected header frame,area_pixels");
  }
  std::map<long long, double> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    const std::string ctx = "mask CSV line " + std::to_string(line_no);
    if (comma == std::string::npos) throw ParseError(ctx + ": expected 2 fields");
    const auto frame = parse_integer(std::string_view(line).substr(0, comma), ctx + " field frame");
    const auto rest = std::string_view(line).substr(comma + 1);
    const double area = parse_double(rest.substr(0, rest.find(',')), ctx + " field area_pixels");
    if (!rows.emplace(frame, area).second) throw ValidationError(ctx + ": duplicate frame");
  }
  std::vector<double> areas;
  long long expect = 0;
  for (const auto& [frame, area] : rows) {
    if (frame != expect++) throw ValidationError("mask CSV: frames must be 0..N-1 without gaps");
    areas.push_back(area);
  }
  if (areas.empty()) throw ValidationError("mask CSV: no rows");
  return areas;
}

}  // namespace dmt
