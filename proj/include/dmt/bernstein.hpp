#pragma once

// Bernstein and power polynomial bases.
//
// Two evaluation paths exist for the Bernstein basis:
//   * basis_row     builds the row with the triangular (de Casteljau) recurrence,
//                   exact at the end points and free of binomial overflow;
//   * basis_row_log evaluates every entry as exp(log C(n,i) + i log t + (n-i) log(1-t)),
//                   which keeps high degrees (hundreds) finite in float and double.
// stable_basis_row picks between them by degree.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmt/error.hpp"
#include "dmt/linalg.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

enum class BasisKind { Bernstein, Power };

inline std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Bernstein:
      return "bernstein";
    case BasisKind::Power:
      return "power";
  }
  return "unknown";
}

inline BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "bernstein") return BasisKind::Bernstein;
  if (name == "power") return BasisKind::Power;
  throw ValidationError("unknown basis '" + name + "' (expected bernstein or power)");
}

inline constexpr int kDefaultMaxDegree = 1024;

// Degrees above this are evaluated through the log-space path.
inline constexpr int kDefaultLogSwitchDegree = 60;

struct BasisLimits {
  int max_degree = kDefaultMaxDegree;
};

template <std::floating_point Real>
struct BasisRowT {
  BasisKind kind = BasisKind::Bernstein;
  int degree = 0;
  Real t = 0;
  std::vector<Real> values;
};

using BasisRow = BasisRowT<double>;

namespace detail {

template <std::floating_point Real>
void check_basis_args(int n, Real t, const BasisLimits& limits) {
  if (n < 0) throw DomainError("basis degree must be nonnegative, got " + std::to_string(n));
  if (n > limits.max_degree) {
    throw CapacityError("basis degree " + std::to_string(n) + " exceeds configured maximum " +
                        std::to_string(limits.max_degree));
  }
  if (!(t >= Real(0) && t <= Real(1))) {
    throw DomainError("basis parameter must lie in [0,1], got " + std::to_string(double(t)));
  }
}

}  // namespace detail

template <std::floating_point Real = double>
BasisRowT<Real> basis_row(BasisKind kind, int n, Real t, const BasisLimits& limits = {}) {
  detail::check_basis_args(n, t, limits);
  BasisRowT<Real> row{kind, n, t, std::vector<Real>(static_cast<std::size_t>(n) + 1, Real(0))};
  auto& b = row.values;
  switch (kind) {
    case BasisKind::Bernstein: {
      const Real s = Real(1) - t;
      b[0] = Real(1);
      for (int k = 1; k <= n; ++k) {
        b[k] = t * b[k - 1];
        for (int j = k - 1; j >= 1; --j) b[j] = s * b[j] + t * b[j - 1];
        b[0] *= s;
      }
      break;
    }
    case BasisKind::Power: {
      // 0^0 = 1
      Real p = Real(1);
      for (int i = 0; i <= n; ++i) {
        b[i] = p;
        p *= t;
      }
      break;
    }
  }
  return row;
}

template <std::floating_point Real = double>
BasisRowT<Real> basis_row_log(int n, Real t, const BasisLimits& limits = {}) {
  detail::check_basis_args(n, t, limits);
  BasisRowT<Real> row{BasisKind::Bernstein, n, t,
                      std::vector<Real>(static_cast<std::size_t>(n) + 1, Real(0))};
  auto& b = row.values;
  if (t == Real(0)) {
    b.front() = Real(1);
    return row;
  }
  if (t == Real(1)) {
    b.back() = Real(1);
    return row;
  }
  const Real log_t = std::log(t);
  const Real log_s = std::log1p(-t);
  const Real log_n_fact = std::lgamma(Real(n + 1));
  for (int i = 0; i <= n; ++i) {
    const Real log_binom = log_n_fact - std::lgamma(Real(i + 1)) - std::lgamma(Real(n - i + 1));
    b[i] = std::exp(log_binom + Real(i) * log_t + Real(n - i) * log_s);
  }
  return row;
}

// Bernstein rows above log_switch_degree go through the log path; everything else is direct.
inline BasisRow stable_basis_row(BasisKind kind, int n, double t,
                                 int log_switch_degree = kDefaultLogSwitchDegree,
                                 const BasisLimits& limits = {}) {
  if (kind == BasisKind::Bernstein && n > log_switch_degree) return basis_row_log(n, t, limits);
  return basis_row(kind, n, t, limits);
}

// Chebyshev points of the first kind mapped from [-1,1] to [0,1], ascending.
inline std::vector<double> chebyshev_nodes(int m) {
  if (m < 0) throw DomainError("node count degree must be nonnegative");
  std::vector<double> nodes(static_cast<std::size_t>(m) + 1);
  const double count = m + 1;
  for (int k = 0; k <= m; ++k) {
    nodes[k] = 0.5 * (1.0 - std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * count)));
  }
  return nodes;
}

// Entry (k,i) is B_{m,i}(nodes[k]).
inline Eigen::MatrixXd collocation_matrix(int m, std::span<const double> nodes) {
  if (m < 0) throw DomainError("curve degree must be nonnegative");
  if (nodes.size() != static_cast<std::size_t>(m) + 1) {
    throw DegenerateInputError("collocation needs exactly m+1 = " + std::to_string(m + 1) +
                               " nodes, got " + std::to_string(nodes.size()));
  }
  std::vector<double> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DegenerateInputError("collocation nodes must be pairwise distinct");
  }
  Eigen::MatrixXd mat(m + 1, m + 1);
  for (int k = 0; k <= m; ++k) {
    const auto row = stable_basis_row(BasisKind::Bernstein, m, nodes[k]);
    for (int i = 0; i <= m; ++i) mat(k, i) = row.values[i];
  }
  return mat;
}

inline constexpr double kMaxCollocationCondition = 1e12;

// Recovers the control points whose Bezier curve passes through curve_samples at nodes.
inline std::vector<Vec2> solve_control_points(std::span<const Vec2> curve_samples,
                                              std::span<const double> nodes) {
  if (curve_samples.size() != nodes.size() || nodes.empty()) {
    throw DegenerateInputError("need one curve sample per node");
  }
  const int m = static_cast<int>(nodes.size()) - 1;
  const Eigen::MatrixXd mat = collocation_matrix(m, nodes);
  const double cond = condition_number(mat);
  if (!(cond <= kMaxCollocationCondition)) {
    throw ConditioningError("collocation matrix condition " + std::to_string(cond) +
                                " exceeds " + std::to_string(kMaxCollocationCondition),
                            cond);
  }
  Eigen::MatrixXd rhs(m + 1, 2);
  for (int k = 0; k <= m; ++k) {
    rhs(k, 0) = curve_samples[k].x;
    rhs(k, 1) = curve_samples[k].y;
  }
  const Eigen::MatrixXd sol = mat.partialPivLu().solve(rhs);
  std::vector<Vec2> control(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) control[i] = {sol(i, 0), sol(i, 1)};
  return control;
}

}  // namespace dmt
