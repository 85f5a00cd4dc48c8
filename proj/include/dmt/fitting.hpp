#pragma once

// Polynomial trajectory fitting to per-frame positions: interpolation through
// selected frames, least squares over all frames, and ridge regression.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dmt/bernstein.hpp"
#include "dmt/error.hpp"
#include "dmt/linalg.hpp"
#include "dmt/trajectory.hpp"
#include "dmt/vec2.hpp"

namespace dmt {

inline constexpr double kDefaultRidgeLambda = 1e-3;

enum class FitMethodKind { Interpolation, LeastSquares, Ridge };

struct FitMethod {
  FitMethodKind kind = FitMethodKind::Ridge;
  double lambda = kDefaultRidgeLambda;

  static FitMethod interpolation() { return {FitMethodKind::Interpolation, 0.0}; }
  static FitMethod least_squares() { return {FitMethodKind::LeastSquares, 0.0}; }
  static FitMethod ridge(double lambda = kDefaultRidgeLambda) {
    return {FitMethodKind::Ridge, lambda};
  }

  std::string name() const {
    switch (kind) {
      case FitMethodKind::Interpolation:
        return "interpolation";
      case FitMethodKind::LeastSquares:
        return "least_squares";
      case FitMethodKind::Ridge:
        return "ridge";
    }
    return "unknown";
  }
};

struct FitSamples {
  std::vector<double> times;
  std::vector<Vec2> positions;

  // Positions at frames 0..N-1, timed i/(N-1).
  static FitSamples from_frames(std::vector<Vec2> positions) {
    FitSamples s;
    s.times.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) s.times[i] = frame_time(i, positions.size());
    s.positions = std::move(positions);
    s.validate();
    return s;
  }

  std::size_t size() const noexcept { return times.size(); }

  void validate() const {
    if (times.size() != positions.size()) {
      throw ValidationError("fit samples: times and positions differ in length");
    }
    if (times.size() < 2) throw ValidationError("fit samples: need at least two frames");
    if (times.front() != 0.0 || times.back() != 1.0) {
      throw ValidationError("fit samples: times must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) {
        throw ValidationError("fit samples: times must be strictly increasing");
      }
    }
  }
};

struct FitReport {
  double mae = 0.0;
  double avg_abs_coeff = 0.0;
  double max_abs_error = 0.0;
  double condition_estimate = 0.0;
};

// Design matrix: row k is the basis row at times[k].
inline Eigen::MatrixXd design_matrix(std::span<const double> times, int degree, BasisKind basis) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(times.size()), degree + 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto row = stable_basis_row(basis, degree, times[k]);
    for (int i = 0; i <= degree; ++i) a(static_cast<Eigen::Index>(k), i) = row.values[i];
  }
  return a;
}

// n+1 frame indices uniformly spaced by index, first and last included.
inline std::vector<std::size_t> interpolation_frames(std::size_t num_frames, int degree) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(degree) + 1);
  if (degree == 0) {
    idx[0] = 0;
    return idx;
  }
  const double step = static_cast<double>(num_frames - 1) / degree;
  for (int k = 0; k <= degree; ++k) idx[k] = static_cast<std::size_t>(std::llround(k * step));
  return idx;
}

// Factors the fitting system once so many position sets can be fitted at the same times.
class LinearFitter {
 public:
  LinearFitter(std::span<const double> times, int degree, FitMethod method,
               BasisKind basis = BasisKind::Bernstein)
      : degree_(degree), method_(method), basis_(basis) {
    if (degree < 0) throw DomainError("fit degree must be nonnegative");
    const std::size_t count = times.size();
    const auto params = static_cast<std::size_t>(degree) + 1;
    switch (method.kind) {
      case FitMethodKind::Interpolation: {
        if (count < params) {
          throw DomainError("interpolation needs at least n+1 = " + std::to_string(params) +
                            " frames, got " + std::to_string(count));
        }
        selected_ = interpolation_frames(count, degree);
        std::vector<double> nodes;
        for (auto i : selected_) nodes.push_back(times[i]);
        const Eigen::MatrixXd square = design_matrix(nodes, degree, basis);
        condition_ = condition_number(square);
        lu_ = square.partialPivLu();
        const auto diag = lu_.matrixLU().diagonal();
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
          if (diag(i) == 0.0 || !std::isfinite(diag(i))) {
            throw ConditioningError("interpolation system is singular", condition_);
          }
        }
        break;
      }
      case FitMethodKind::Ridge:
        if (!(method.lambda >= 0.0) || !std::isfinite(method.lambda)) {
          throw DomainError("ridge lambda must be finite and >= 0");
        }
        if (method.lambda > 0.0) {
          Eigen::MatrixXd aug(static_cast<Eigen::Index>(count + params),
                              static_cast<Eigen::Index>(params));
          aug.topRows(static_cast<Eigen::Index>(count)) = design_matrix(times, degree, basis);
          aug.bottomRows(static_cast<Eigen::Index>(params)) =
              std::sqrt(method.lambda) *
              Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(params),
                                        static_cast<Eigen::Index>(params));
          condition_ = condition_number(aug);
          qr_ = aug.householderQr();
          rows_ = count;
          break;
        }
        [[fallthrough]];
      case FitMethodKind::LeastSquares: {
        const Eigen::MatrixXd a = design_matrix(times, degree, basis);
        svd_.compute(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd_.singularValues();
        condition_ = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                           : std::numeric_limits<double>::infinity();
        if (count < params) {
          throw ConditioningError("least squares is rank deficient: " + std::to_string(count) +
                                      " frames for " + std::to_string(params) + " coefficients",
                                  std::numeric_limits<double>::infinity());
        }
        break;
      }
    }
  }

  int degree() const noexcept { return degree_; }
  const FitMethod& method() const noexcept { return method_; }
  BasisKind basis() const noexcept { return basis_; }
  double condition_estimate() const noexcept { return condition_; }
  std::span<const std::size_t> selected_frames() const noexcept { return selected_; }

  // Each column of rhs holds one coordinate sequence over all frames; returns coefficient columns.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd sol;
    switch (method_.kind) {
      case FitMethodKind::Interpolation: {
        Eigen::MatrixXd picked(static_cast<Eigen::Index>(selected_.size()), rhs.cols());
        for (std::size_t k = 0; k < selected_.size(); ++k) {
          picked.row(static_cast<Eigen::Index>(k)) = rhs.row(static_cast<Eigen::Index>(selected_[k]));
        }
        const Eigen::RowVectorXd mean = picked.colwise().mean();
        sol = lu_.solve(picked.rowwise() - mean);
        add_constant(sol, mean);
        break;
      }
      case FitMethodKind::Ridge:
        if (method_.lambda > 0.0) {
          Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(qr_.rows(), rhs.cols());
          aug.topRows(static_cast<Eigen::Index>(rows_)) = rhs;
          sol = qr_.solve(aug);
          break;
        }
        [[fallthrough]];
      case FitMethodKind::LeastSquares: {
        const Eigen::RowVectorXd mean = rhs.colwise().mean();
        sol = svd_.solve(rhs.rowwise() - mean);
        add_constant(sol, mean);
        break;
      }
    }
    if (!sol.allFinite()) {
      throw ConditioningError(method_.name() + " fit produced non-finite coefficients", condition_);
    }
    return sol;
  }

  TrajectoryPoly fit(std::span<const Vec2> positions) const {
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(positions.size()), 2);
    for (std::size_t k = 0; k < positions.size(); ++k) {
      rhs(static_cast<Eigen::Index>(k), 0) = positions[k].x;
      rhs(static_cast<Eigen::Index>(k), 1) = positions[k].y;
    }
    const Eigen::MatrixXd sol = solve(rhs);
    std::vector<Vec2> coeffs(static_cast<std::size_t>(sol.rows()));
    for (Eigen::Index i = 0; i < sol.rows(); ++i) coeffs[i] = {sol(i, 0), sol(i, 1)};
    return {basis_, std::move(coeffs)};
  }

 private:
  // Adds the coefficients of a constant trajectory with value `value` per column.
  void add_constant(Eigen::MatrixXd& sol, const Eigen::RowVectorXd& value) const {
    if (basis_ == BasisKind::Bernstein) {
      sol.rowwise() += value;
    } else {
      sol.row(0) += value;
    }
  }

  int degree_;
  FitMethod method_;
  BasisKind basis_;
  double condition_ = 1.0;
  std::size_t rows_ = 0;
  std::vector<std::size_t> selected_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::BDCSVD<Eigen::MatrixXd> svd_;
};

inline TrajectoryPoly fit_trajectory(const FitSamples& samples, int degree, FitMethod method,
                                     BasisKind basis = BasisKind::Bernstein) {
  samples.validate();
  return LinearFitter(samples.times, degree, method, basis).fit(samples.positions);
}

inline TrajectoryPoly fit_interpolation(const FitSamples& samples, int degree,
                                        BasisKind basis = BasisKind::Bernstein) {
  return fit_trajectory(samples, degree, FitMethod::interpolation(), basis);
}

inline TrajectoryPoly fit_least_squares(const FitSamples& samples, int degree,
                                        BasisKind basis = BasisKind::Bernstein) {
  return fit_trajectory(samples, degree, FitMethod::least_squares(), basis);
}

inline TrajectoryPoly fit_ridge(const FitSamples& samples, int degree, double lambda,
                                BasisKind basis = BasisKind::Bernstein) {
  return fit_trajectory(samples, degree, FitMethod::ridge(lambda), basis);
}

// Euclidean per-frame errors of traj against samples, plus coefficient magnitude.
inline FitReport evaluate_fit(const TrajectoryPoly& traj, const FitSamples& samples,
                              double condition_estimate = 0.0) {
  FitReport r;
  r.condition_estimate = condition_estimate;
  double sum = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double e = distance(eval_trajectory(traj, samples.times[k]), samples.positions[k]);
    sum += e;
    r.max_abs_error = std::max(r.max_abs_error, e);
  }
  r.mae = samples.size() ? sum / static_cast<double>(samples.size()) : 0.0;
  double coeff_sum = 0.0;
  for (const auto& c : traj.coeffs()) coeff_sum += std::abs(c.x) + std::abs(c.y);
  r.avg_abs_coeff = coeff_sum / (2.0 * static_cast<double>(traj.coeffs().size()));
  return r;
}

}  // namespace dmt
