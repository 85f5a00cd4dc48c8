#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <dmt/bernstein.hpp>
#include <dmt/fit_benchmark.hpp>
#include <dmt/fitting.hpp>
#include <dmt/linalg.hpp>
#include <dmt/model_io.hpp>
#include <dmt/optimize.hpp>
#include <dmt/svg.hpp>
#include <dmt/synthetic.hpp>
#include <dmt/track_io.hpp>
#include <dmt/tracking.hpp>

#include "../test_support.hpp"

using namespace dmt;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome basis_stability() {
  double worst_sum = 0.0, worst_float = 0.0;
  bool finite = true;
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    const auto row = basis_row_log(199, t);
    double sum = 0.0;
    for (double v : row.values) sum += v;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const auto single = basis_row_log<float>(199, static_cast<float>(t));
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      finite = finite && std::isfinite(single.values[i]);
      worst_float = std::max(worst_float, std::abs(static_cast<double>(single.values[i]) - row.values[i]));
    }
  }
  return {worst_sum <= 1e-6 && finite && worst_float <= 1e-3,
          fmt("max |sum-1| %.2e, float finite %s, max |float-double| %.2e", worst_sum, finite ? "yes" : "no",
              worst_float)};
}

Outcome sensitivity() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> degree(0, 1024);
  std::uniform_real_distribution<double> param(0.0, 1.0);
  int bernstein_bad = 0, power_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    if (sensitivity_l1(BasisKind::Bernstein, degree(rng), param(rng)) != 1.0) ++bernstein_bad;
  }
  for (int n = 1; n <= 199; ++n) {
    if (sensitivity_l1(BasisKind::Power, n, 1.0) != n + 1.0) ++power_bad;
  }
  return {bernstein_bad == 0 && power_bad == 0,
          fmt("bernstein mismatches %d/1000, power mismatches %d/199", bernstein_bad, power_bad)};
}

Outcome fitting_trend() {
  const auto tracks = synthetic::complex_motion_tracks({.num_points = 100});
  const auto table = run_fit_benchmark(tracks, default_benchmark_configs());
  const auto* interp = table.find(400, 199, FitMethodKind::Interpolation);
  const auto* ls = table.find(400, 199, FitMethodKind::LeastSquares);
  const auto* ridge = table.find(400, 199, FitMethodKind::Ridge);
  if (!interp || !ls || !ridge) return {false, "missing (400,199) rows"};
  double lo = INFINITY, hi = 0.0;
  for (const auto& c : default_benchmark_configs()) {
    const auto* r = table.find(c.frames, c.degree, FitMethodKind::Ridge);
    if (!r) return {false, "missing ridge row"};
    lo = std::min(lo, r->report.avg_abs_coeff);
    hi = std::max(hi, r->report.avg_abs_coeff);
  }
  const double ratio = ls->report.avg_abs_coeff / ridge->report.avg_abs_coeff;
  return {interp->report.mae > 1e2 && ridge->report.mae <= 5.0 && ratio >= 1e3 && hi <= 10.0 * lo,
          fmt("interp MAE %.3e, ridge MAE %.3f, LS/ridge coeff %.3e, ridge coeff range %.3e..%.3e",
              interp->report.mae, ridge->report.mae, ratio, lo, hi)};
}

Outcome collocation_recovery() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-100.0, 100.0), jitter(-1.0, 1.0);
  double worst = 0.0, worst_ratio = 0.0;
  bool shrinks = true;
  for (int m = 1; m <= 10; ++m) {
    const auto nodes = chebyshev_nodes(m);
    const double cond = condition_number(collocation_matrix(m, nodes));
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Vec2> ctrl(static_cast<std::size_t>(m) + 1);
      for (auto& p : ctrl) p = {coord(rng), coord(rng)};
      std::vector<Vec2> samples;
      for (double u : nodes) samples.push_back(bezier_point(ctrl, u));
      const auto got = solve_control_points(samples, nodes);
      for (std::size_t i = 0; i < ctrl.size(); ++i) worst = std::max(worst, distance(got[i], ctrl[i]));

      std::vector<Vec2> direction(samples.size());
      for (auto& d : direction) d = {jitter(rng), jitter(rng)};
      double previous = INFINITY;
      for (double scale : {1e-2, 1e-4, 1e-6}) {
        auto moved = samples;
        double in2 = 0.0, out2 = 0.0;
        for (std::size_t k = 0; k < moved.size(); ++k) {
          moved[k] += scale * direction[k];
          in2 += squared_norm(scale * direction[k]);
        }
        const auto back = solve_control_points(moved, nodes);
        for (std::size_t i = 0; i < back.size(); ++i) out2 += squared_norm(back[i] - got[i]);
        const double change = std::sqrt(out2);
        worst_ratio = std::max(worst_ratio, change / (cond * std::sqrt(in2)));
        shrinks = shrinks && change < previous;
        previous = change;
      }
    }
  }
  return {worst <= 1e-8 && worst_ratio <= 1.0 + 1e-6 && shrinks,
          fmt("max recovery error %.2e, max |dP|/(cond |dS|) %.3f, shrinks with perturbation %s", worst,
              worst_ratio, shrinks ? "yes" : "no")};
}

Outcome approximation_bound() {
  constexpr int m = 3;
  constexpr std::size_t samples = 201;
  const double two_pi = 2.0 * std::numbers::pi;
  auto truth = [&](int i, double t) {
    return Vec2{50.0 * i + 30.0 * std::sin(two_pi * (1.3 * t + 0.1 * i)),
                20.0 * i + 25.0 * std::cos(two_pi * (0.8 * t + 0.2 * i)) + 5.0 * std::sin(two_pi * 3.1 * t)};
  };
  std::vector<std::vector<Vec2>> grid_truth(m + 1);
  for (int i = 0; i <= m; ++i) {
    for (int k = 0; k <= 100; ++k) grid_truth[i].push_back(truth(i, k / 100.0));
  }
  auto sup_errors = [&](int degree) {
    std::vector<TrajectoryPoly> fitted;
    for (int i = 0; i <= m; ++i) {
      std::vector<Vec2> pos;
      for (std::size_t f = 0; f < samples; ++f) pos.push_back(truth(i, frame_time(f, samples)));
      fitted.push_back(fit_least_squares(FitSamples::from_frames(std::move(pos)), degree));
    }
    double control_sup = 0.0, curve_sup = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      std::vector<Vec2> p(m + 1), q(m + 1);
      for (int i = 0; i <= m; ++i) {
        p[i] = grid_truth[i][k];
        q[i] = eval_trajectory(fitted[i], t);
        control_sup = std::max(control_sup, distance(p[i], q[i]));
      }
      for (int j = 0; j <= 100; ++j) {
        const double u = j / 100.0;
        curve_sup = std::max(curve_sup, distance(bezier_point(p, u), bezier_point(q, u)));
      }
    }
    return std::pair{curve_sup, control_sup};
  };
  const auto [c10, p10] = sup_errors(10);
  const auto [c40, p40] = sup_errors(40);
  const double slack = 1e-12;
  return {c10 <= p10 * (1 + slack) + slack && c40 <= p40 * (1 + slack) + slack && c40 <= c10,
          fmt("deg 10: curve %.3e <= control %.3e; deg 40: curve %.3e <= control %.3e", c10, p10, c40, p40)};
}

Outcome gradient_suite() {
  double worst_cons = 0.0, worst_att = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const std::size_t strokes = 1 + seed % 3, frames = 3 + seed % 4;
    const int m = 1 + static_cast<int>(seed % 4);
    const auto anim = testing_support::random_animation(rng, strokes, frames, m, static_cast<int>(frames) - 1);
    const auto tracks = testing_support::random_tracks(rng, 4 + seed % 5, frames);
    const auto other = testing_support::random_animation(rng, strokes, frames, 3, 2);
    StrokeTargets targets;
    for (const auto& s : other.strokes()) {
      std::vector<Vec2> mids;
      for (std::size_t i = 0; i < frames; ++i) mids.push_back(eval_curve_point(s, 0.5, frame_time(i, frames)));
      targets.push_back(std::move(mids));
    }
    worst_cons = std::max(worst_cons, finite_difference_check(anim, tracks, targets, {0, 0, 1}, 3));
    worst_att = std::max(worst_att, finite_difference_check(anim, tracks, targets, {1, 0, 0}, 3));
  }
  return {worst_cons < 1e-5 && worst_att < 1e-8,
          fmt("consistency max rel err %.2e, attachment max rel err %.2e", worst_cons, worst_att)};
}

Outcome optimization_recovery() {
  const auto scene = testing_support::make_recovery_scene(1);
  const double initial = total_loss(scene.start, scene.tracks, scene.targets, {}).breakdown.total;
  const auto res = optimize_animation(scene.start, scene.tracks, scene.targets, {}, OptimConfig{});
  double worst = 0.0;
  const std::size_t nf = res.animation.num_frames();
  for (std::size_t j = 0; j < res.animation.num_strokes(); ++j) {
    for (std::size_t i = 0; i < nf; ++i) {
      worst = std::max(worst, distance(eval_curve_point(res.animation.strokes()[j], 0.5, frame_time(i, nf)),
                                       scene.targets[j][i]));
    }
  }
  const double reduction = 1.0 - res.breakdown.total / initial;
  return {reduction >= 0.95 && worst <= 2.0,
          fmt("loss %.3e -> %.3e (%.2f%% reduction), max midpoint error %.3f px", initial, res.breakdown.total,
              100.0 * reduction, worst)};
}

Outcome transfer_invariants() {
  const auto tracks = synthetic::complex_motion_tracks({.num_points = 200, .num_frames = 30});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coord(100.0, 412.0), nudge(-0.05, 0.05);
  std::uniform_int_distribution<std::size_t> frame(0, 29);
  int identity_bad = 0, offset_bad = 0, nearest_bad = 0, offset_checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{coord(rng), coord(rng)};
    const std::size_t i = frame(rng), t = frame(rng);
    if (transfer_point(p, i, i, tracks) != p) ++identity_bad;
    if (nearest_sample(p, i, tracks) != nearest_sample_brute_force(p, i, tracks)) ++nearest_bad;
    const Vec2 q = p + Vec2{nudge(rng), nudge(rng)};
    if (nearest_sample(q, i, tracks) == nearest_sample(p, i, tracks)) {
      ++offset_checked;
      const Vec2 lhs = transfer_point(p, i, t, tracks) - transfer_point(q, i, t, tracks);
      if (distance(lhs, p - q) > 1e-9) ++offset_bad;
    }
  }
  return {identity_bad == 0 && offset_bad == 0 && nearest_bad == 0 && offset_checked >= 900,
          fmt("identity failures %d, offset failures %d/%d, nearest mismatches %d/1000", identity_bad, offset_bad,
              offset_checked, nearest_bad)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + DMT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Largest deviation between parsed key geometries and direct evaluation at the plan times.
double key_geometry_error(const std::string& svg, const SketchAnimation& anim, const FrameRatePlan& plan,
                          bool& shape_ok) {
  const auto values = svg_attribute_values(svg, "values");
  shape_ok = values.size() == 2 * anim.num_strokes();
  double worst = 0.0;
  for (std::size_t j = 0; shape_ok && j < anim.num_strokes(); ++j) {
    const auto& stroke = anim.strokes()[j];
    const auto keys = split_list(values[2 * j], ';');
    if (keys.size() != plan.size()) {
      shape_ok = false;
      break;
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const double t = plan.output_frame_times[k];
      const auto pts = parse_path_points(keys[k]);
      const int m = stroke.curve_degree();
      if (m <= 3) {
        const auto ctrl = control_points_at(stroke, t);
        if (pts.size() != ctrl.size()) {
          shape_ok = false;
          break;
        }
        for (std::size_t c = 0; c < ctrl.size(); ++c) worst = std::max(worst, distance(pts[c], ctrl[c]));
      }
      const auto on_curve = path_on_curve_points(pts, m);
      const auto u = path_on_curve_parameters(m);
      for (std::size_t c = 0; c < u.size() && c < on_curve.size(); ++c) {
        worst = std::max(worst, distance(on_curve[c], eval_curve_point(stroke, u[c], t)));
      }
    }
  }
  return worst;
}

struct PipelineRun {
  bool ok = false;
  fs::path dir;
};

PipelineRun run_pipeline(const fs::path& dir) {
  const fs::path tracks = fs::path(DMT_TEST_DATA_DIR) / "synthetic_16x50.json";
  fs::create_directories(dir);
  PipelineRun r{false, dir};
  if (run_cli("init --tracks " + q(tracks) + " --out " + q(dir / "init.json") + " --strokes 12 --seed 5") != 0) return r;
  if (run_cli("optimize --model " + q(dir / "init.json") + " --tracks " + q(tracks) + " --out " +
              q(dir / "opt.json") + " --log " + q(dir / "log.csv")) != 0) {
    return r;
  }
  if (run_cli("export --model " + q(dir / "opt.json") + " --svg " + q(dir / "anim.svg")) != 0) return r;
  if (run_cli("interp --model " + q(dir / "opt.json") + " --in-fps 6 --out-fps 24 --svg " + q(dir / "interp.svg")) != 0) {
    return r;
  }
  r.ok = true;
  return r;
}

Outcome end_to_end_cli(const testing_support::TempDir& work) {
  const auto a = run_pipeline(work.path() / "run_a");
  const auto b = run_pipeline(work.path() / "run_b");
  if (!a.ok || !b.ok) return {false, "a CLI step exited non-zero"};
  bool identical = true;
  for (const char* name : {"init.json", "opt.json", "log.csv", "anim.svg", "interp.svg"}) {
    identical = identical && read_text_file(a.dir / name) == read_text_file(b.dir / name);
  }
  const auto anim = load_model(a.dir / "opt.json");
  bool shape_ok = false;
  const double err = key_geometry_error(read_text_file(a.dir / "anim.svg"), anim, identity_plan(anim, 24), shape_ok);
  return {identical && shape_ok && err <= 1e-5,
          fmt("%zu strokes x %zu keys, max key error %.2e px, repeat runs byte-identical %s", anim.num_strokes(),
              anim.num_frames(), err, identical ? "yes" : "no")};
}

Outcome frame_interpolation(const testing_support::TempDir& work) {
  const fs::path dir = work.path() / "run_a";
  if (!fs::exists(dir / "interp.svg")) return {false, "pipeline output missing"};
  const auto anim = load_model(dir / "opt.json");
  const auto plan = resample_framerate(anim, 6, 24);
  const auto svg = read_text_file(dir / "interp.svg");
  bool shape_ok = false;
  const double err = key_geometry_error(svg, anim, plan, shape_ok);
  const std::size_t nf = anim.num_frames();
  bool dense = plan.size() == 4 * (nf - 1) + 1;
  bool frames_match = shape_ok;
  const auto values = svg_attribute_values(svg, "values");
  for (std::size_t j = 0; frames_match && j < anim.num_strokes(); ++j) {
    const auto keys = split_list(values[2 * j], ';');
    for (std::size_t i = 0; i < nf; ++i) {
      frames_match = frames_match && plan.output_frame_times[4 * i] == frame_time(i, nf) &&
                     keys[4 * i] == stroke_path_data(anim.strokes()[j], frame_time(i, nf));
    }
  }
  return {shape_ok && dense && frames_match && err <= 1e-5,
          fmt("%zu input frames -> %zu keys, every 4th key equals the input frame %s, max key error %.2e px", nf,
              plan.size(), frames_match ? "yes" : "no", err)};
}

}  // namespace

int main() {
  const testing_support::TempDir work;
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "basis stability", 1.0, basis_stability},
      {2, "sensitivity", 1.0, sensitivity},
      {3, "fitting trend", 30.0, fitting_trend},
      {4, "collocation recovery", 1.0, collocation_recovery},
      {5, "approximation bound", 5.0, approximation_bound},
      {6, "gradient suite", 10.0, gradient_suite},
      {7, "optimization recovery", 30.0, optimization_recovery},
      {8, "transfer invariants", 60.0, transfer_invariants},
      {9, "end-to-end CLI", 60.0, [&] { return end_to_end_cli(work); }},
      {10, "frame interpolation", 60.0, [&] { return frame_interpolation(work); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && seconds <= c.limit_seconds;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds, c.limit_seconds);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
