#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace dmt {

// Ratio of extreme singular values; infinity for a numerically singular matrix.
inline double condition_number(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace dmt
