#pragma once

// Fitting-method comparison over a track set: every configuration truncates the tracks to
// its frame count, fits all three methods per point and averages the reports.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmt/error.hpp"
#include "dmt/fitting.hpp"
#include "dmt/format.hpp"
#include "dmt/tracking.hpp"

namespace dmt {

struct BenchmarkConfig {
  std::size_t frames = 0;
  int degree = 0;
};

inline const std::vector<BenchmarkConfig>& default_benchmark_configs() {
  static const std::vector<BenchmarkConfig> configs = {{50, 24}, {100, 49}, {200, 99}, {400, 199}};
  return configs;
}

struct BenchmarkRow {
  std::size_t frames = 0;
  int degree = 0;
  FitMethod method;
  FitReport report;
};

struct BenchmarkWarning {
  std::size_t frames = 0;
  int degree = 0;
  std::string message;
};

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkWarning> warnings;

  const BenchmarkRow* find(std::size_t frames, int degree, FitMethodKind kind) const {
    for (const auto& r : rows) {
      if (r.frames == frames && r.degree == degree && r.method.kind == kind) return &r;
    }
    return nullptr;
  }

  std::string to_csv() const {
    std::string out = "frames,degree,method,mae,avg_abs_coeff,max_abs_error,condition_estimate\n";
    for (const auto& r : rows) {
      out += std::to_string(r.frames) + "," + std::to_string(r.degree) + "," + r.method.name() +
             "," + format_scientific(r.report.mae) + "," +
             format_scientific(r.report.avg_abs_coeff) + "," +
             format_scientific(r.report.max_abs_error) + "," +
             format_scientific(r.report.condition_estimate) + "\n";
    }
    return out;
  }

  // Two column groups (error, coefficient magnitude) with one column per method.
  std::string to_markdown() const {
    const FitMethodKind kinds[3] = {FitMethodKind::Interpolation, FitMethodKind::LeastSquares,
                                    FitMethodKind::Ridge};
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"frames", "degree", "MAE interpolation", "MAE least squares", "MAE ridge",
                     "avg|coeff| interpolation", "avg|coeff| least squares", "avg|coeff| ridge"});
    std::vector<std::pair<std::size_t, int>> configs;
    for (const auto& r : rows) {
      if (std::find(configs.begin(), configs.end(), std::pair{r.frames, r.degree}) ==
          configs.end()) {
        configs.emplace_back(r.frames, r.degree);
      }
    }
    for (const auto& [frames, degree] : configs) {
      std::vector<std::string> line = {std::to_string(frames), std::to_string(degree)};
      for (int group = 0; group < 2; ++group) {
        for (auto kind : kinds) {
          const auto* r = find(frames, degree, kind);
          if (!r) {
            line.push_back("n/a");
          } else {
            line.push_back(format_scientific(group == 0 ? r->report.mae : r->report.avg_abs_coeff, 3));
          }
        }
      }
      cells.push_back(std::move(line));
    }
    std::vector<std::size_t> widths(cells.front().size(), 0);
    for (const auto& line : cells) {
      for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
    }
    auto render = [&](const std::vector<std::string>& line) {
      std::string s = "|";
      for (std::size_t c = 0; c < line.size(); ++c) {
        s += " " + line[c] + std::string(widths[c] - line[c].size(), ' ') + " |";
      }
      return s + "\n";
    };
    std::string out = render(cells.front());
    out += "|";
    for (auto w : widths) out += std::string(w + 2, '-') + "|";
    out += "\n";
    for (std::size_t k = 1; k < cells.size(); ++k) out += render(cells[k]);
    return out;
  }
};

inline BenchmarkTable run_fit_benchmark(const TrackSet& tracks,
                                        std::span<const BenchmarkConfig> configs,
                                        double lambda = kDefaultRidgeLambda,
                                        BasisKind basis = BasisKind::Bernstein) {
  BenchmarkTable table;
  const FitMethod methods[3] = {FitMethod::interpolation(), FitMethod::least_squares(),
                                FitMethod::ridge(lambda)};
  for (const auto& cfg : configs) {
    if (cfg.frames < 2 || cfg.frames > tracks.num_frames()) {
      table.warnings.push_back({cfg.frames, cfg.degree,
                                "skipped: tracks have " + std::to_string(tracks.num_frames()) +
                                    " frames, configuration needs " + std::to_string(cfg.frames)});
      continue;
    }
    std::vector<double> times(cfg.frames);
    for (std::size_t i = 0; i < cfg.frames; ++i) times[i] = frame_time(i, cfg.frames);

    // Column 2j holds x of point j, column 2j+1 its y.
    const auto npts = static_cast<Eigen::Index>(tracks.size());
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(cfg.frames), 2 * npts);
    for (Eigen::Index j = 0; j < npts; ++j) {
      const auto& coords = tracks.points()[static_cast<std::size_t>(j)].coords;
      for (std::size_t i = 0; i < cfg.frames; ++i) {
        rhs(static_cast<Eigen::Index>(i), 2 * j) = coords[i].x;
        rhs(static_cast<Eigen::Index>(i), 2 * j + 1) = coords[i].y;
      }
    }

    for (const auto& method : methods) {
      try {
        const LinearFitter fitter(times, cfg.degree, method, basis);
        const Eigen::MatrixXd coeffs = fitter.solve(rhs);
        const Eigen::MatrixXd fitted = design_matrix(times, cfg.degree, basis) * coeffs;
        FitReport avg;
        avg.condition_estimate = fitter.condition_estimate();
        for (Eigen::Index j = 0; j < npts; ++j) {
          double sum = 0.0, worst = 0.0;
          for (Eigen::Index i = 0; i < rhs.rows(); ++i) {
            const double e = std::hypot(fitted(i, 2 * j) - rhs(i, 2 * j),
                                        fitted(i, 2 * j + 1) - rhs(i, 2 * j + 1));
            sum += e;
            worst = std::max(worst, e);
          }
          avg.mae += sum / static_cast<double>(rhs.rows());
          avg.max_abs_error += worst;
          avg.avg_abs_coeff += (coeffs.col(2 * j).cwiseAbs().sum() +
                                coeffs.col(2 * j + 1).cwiseAbs().sum()) /
                               (2.0 * static_cast<double>(coeffs.rows()));
        }
        avg.mae /= static_cast<double>(npts);
        avg.max_abs_error /= static_cast<double>(npts);
        avg.avg_abs_coeff /= static_cast<double>(npts);
        table.rows.push_back({cfg.frames, cfg.degree, method, avg});
      } catch (const Error& e) {
        table.warnings.push_back({cfg.frames, cfg.degree, method.name() + ": " + e.what()});
      }
    }
  }
  return table;
}

}  // namespace dmt
