#pragma once

#include <cstddef>
#include <vector>

#include "dmt/error.hpp"

namespace dmt {

// Row-major raster of scalars; (x, y) addresses column x of row y.
template <typename T>
struct Grid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), data(w * h, fill) {}

  T& at(std::size_t x, std::size_t y) { return data[y * width + x]; }
  const T& at(std::size_t x, std::size_t y) const { return data[y * width + x]; }

  std::size_t size() const noexcept { return data.size(); }

  bool same_shape(const Grid& o) const noexcept { return width == o.width && height == o.height; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

using ScalarGrid = Grid<double>;

}  // namespace dmt
