#pragma once

// Command-line front end. Exit status: 0 success, 1 usage or validation failure,
// 2 I/O, parse or unsupported-version failure.

#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmt/error.hpp"
#include "dmt/fit_benchmark.hpp"
#include "dmt/format.hpp"
#include "dmt/image_io.hpp"
#include "dmt/init.hpp"
#include "dmt/model_io.hpp"
#include "dmt/optimize.hpp"
#include "dmt/svg.hpp"
#include "dmt/synthetic.hpp"
#include "dmt/track_io.hpp"

namespace dmt {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2 };

namespace detail {

// "50:24,100:49" -> configurations.
inline std::vector<BenchmarkConfig> parse_config_list(const std::string& text) {
  std::vector<BenchmarkConfig> configs;
  for (const auto& item : split_list(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("--configs entries must be frames:degree");
    const auto frames = parse_integer(std::string_view(item).substr(0, colon), "--configs frames");
    const auto degree = parse_integer(std::string_view(item).substr(colon + 1), "--configs degree");
    if (frames < 2 || degree < 0) throw ValidationError("--configs needs frames >= 2 and degree >= 0");
    configs.push_back({static_cast<std::size_t>(frames), static_cast<int>(degree)});
  }
  return configs;
}

// Midpoint C(i, j, 0.5) of every stroke at every frame.
inline StrokeTargets stroke_midpoints(const SketchAnimation& anim) {
  StrokeTargets out;
  for (const auto& s : anim.strokes()) {
    std::vector<Vec2> mids;
    for (std::size_t i = 0; i < anim.num_frames(); ++i) {
      mids.push_back(eval_curve_point(s, 0.5, anim.frame_time(i)));
    }
    out.push_back(std::move(mids));
  }
  return out;
}

inline void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

struct FitBenchArgs {
  std::string tracks, csv, markdown, configs, basis = "bernstein";
  double lambda = kDefaultRidgeLambda;
};

inline int run_fit_bench(const FitBenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto tracks = load_tracks(a.tracks);
  const auto configs = a.configs.empty() ? default_benchmark_configs() : parse_config_list(a.configs);
  if (!(a.lambda >= 0.0)) throw ValidationError("--lambda must be >= 0");
  const auto table = run_fit_benchmark(tracks, configs, a.lambda, basis_kind_from_string(a.basis));
  for (const auto& w : table.warnings) {
    err << "warning: (" << w.frames << "," << w.degree << ") " << w.message << "\n";
  }
  if (!a.csv.empty()) write_text_file(a.csv, table.to_csv());
  if (!a.markdown.empty()) write_text_file(a.markdown, table.to_markdown());
  if (a.csv.empty()) out << table.to_csv();
  return kExitOk;
}

inline constexpr std::size_t kDefaultCanvasSize = 512;

struct InitArgs {
  std::string tracks, out, xdog, attention, mask_areas, basis = "bernstein";
  InitConfig config;
  double width = 0.0, height = 0.0, bandwidth = -1.0, w_max = kDefaultMaxWidth, mask_area = -1.0;
};

inline int run_init(InitArgs a, std::ostream& out, std::ostream&) {
  const auto tracks = load_tracks(a.tracks);
  a.config.basis = basis_kind_from_string(a.basis);
  std::optional<ScalarGrid> xdog, attention;
  if (!a.xdog.empty()) xdog = load_pgm(a.xdog);
  if (!a.attention.empty()) attention = load_pgm(a.attention);
  const ScalarGrid* shape = xdog ? &*xdog : attention ? &*attention : nullptr;
  std::size_t w = shape ? shape->width : a.width > 0.0 ? static_cast<std::size_t>(a.width) : kDefaultCanvasSize;
  std::size_t h = shape ? shape->height : a.height > 0.0 ? static_cast<std::size_t>(a.height) : kDefaultCanvasSize;
  if (shape && ((a.width > 0.0 && static_cast<std::size_t>(a.width) != w) ||
                (a.height > 0.0 && static_cast<std::size_t>(a.height) != h))) {
    throw ValidationError("--width/--height disagree with the map dimensions");
  }
  if (w < 1 || h < 1) throw ValidationError("canvas size must be positive");

  const double bandwidth = a.bandwidth > 0.0 ? a.bandwidth : 0.05 * static_cast<double>(std::max(w, h));
  const auto motion = build_motion_heatmap(tracks, w, h, bandwidth);
  const ScalarGrid ones(w, h, 1.0);
  const auto density = compose_density_map(xdog ? *xdog : ones, attention ? *attention : ones,
                                           motion, a.config.beta);

  if (!a.mask_areas.empty() && a.mask_area >= 0.0) {
    throw ValidationError("pass at most one of --mask-areas and --mask-area");
  }
  std::vector<double> widths(tracks.num_frames(), a.w_max);
  if (!a.mask_areas.empty() || a.mask_area >= 0.0) {
    auto areas = a.mask_areas.empty() ? std::vector<double>(tracks.num_frames(), a.mask_area)
                                      : parse_mask_areas_csv(read_text_file(a.mask_areas));
    if (areas.size() != tracks.num_frames()) {
      throw ValidationError("mask areas list " + std::to_string(areas.size()) + " frames, tracks have " +
                            std::to_string(tracks.num_frames()));
    }
    const MaskAreas mask{std::move(areas), {static_cast<double>(w), static_cast<double>(h)}};
    widths = stroke_width_schedule(mask, a.w_max);
  }
  auto result = init_animation_with_targets(a.config, density, tracks, std::move(widths));
  save_model(result.animation, a.out, result.targets);
  out << "wrote " << a.out << " (" << result.animation.num_strokes() << " strokes, "
      << result.animation.num_frames() << " frames, trajectory degree "
      << result.animation.strokes().front().trajectory_degree() << ")\n";
  return kExitOk;
}

struct OptimizeArgs {
  std::string model, tracks, out, log;
  LossWeights weights;
  OptimConfig config;
};

inline int run_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  auto doc = load_model_document(a.model);
  print_warnings(doc.warnings, err);
  const auto tracks = load_tracks(a.tracks);
  if (a.weights.w_s > 0.0 && doc.attachment_targets.empty()) {
    throw ValidationError("model has no attachment_targets; rerun init or pass --w-s 0");
  }
  const auto targets = doc.attachment_targets.empty() ? stroke_midpoints(doc.animation)
                                                       : doc.attachment_targets;
  auto result = optimize_animation(doc.animation, tracks, targets, a.weights, a.config);
  save_model(result.animation, a.out, doc.attachment_targets);
  if (!a.log.empty()) write_text_file(a.log, history_to_csv(result.breakdown.history));
  const auto& first = result.breakdown.history.front();
  out << "loss " << format_scientific(first.total) << " -> "
      << format_scientific(result.breakdown.total) << " (consistency "
      << format_scientific(result.breakdown.consistency) << ", attachment "
      << format_scientific(result.breakdown.attachment) << ")\n";
  return kExitOk;
}

struct ExportArgs {
  std::string model, frames, svg;
  double fps = 24.0;
};

inline int run_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
  if (a.frames.empty() == a.svg.empty()) throw ValidationError("export needs exactly one of --frames or --svg");
  auto doc = load_model_document(a.model);
  print_warnings(doc.warnings, err);
  if (!a.frames.empty()) {
    const auto paths = export_frame_svgs(doc.animation, a.frames);
    out << "wrote " << paths.size() << " frames to " << a.frames << "\n";
  } else {
    const auto plan = identity_plan(doc.animation, a.fps);
    export_animated_svg(doc.animation, plan, a.svg);
    out << "wrote " << a.svg << " (" << plan.size() << " keys)\n";
  }
  return kExitOk;
}

struct InterpArgs {
  std::string model, svg;
  double in_fps = 0.0, out_fps = 0.0;
};

inline int run_interp(const InterpArgs& a, std::ostream& out, std::ostream& err) {
  auto doc = load_model_document(a.model);
  print_warnings(doc.warnings, err);
  if (!(a.in_fps > 0.0) || !(a.out_fps > 0.0)) throw ValidationError("frame rates must be positive");
  const auto plan = resample_framerate(doc.animation, a.in_fps, a.out_fps);
  export_animated_svg(doc.animation, plan, a.svg);
  out << "wrote " << a.svg << " (" << plan.size() << " keys, " << format_fixed(plan.duration_seconds())
      << " s)\n";
  return kExitOk;
}

struct CheckGradArgs {
  std::string model, tracks;
  int samples = kDefaultSamplesPerStroke;
  double step = 1e-2;
  double w_s = 1.0, w_c = 0.5;
};

// Without --tracks only the attachment term is checked.
inline int run_check_grad(const CheckGradArgs& a, std::ostream& out, std::ostream& err) {
  auto doc = load_model_document(a.model);
  print_warnings(doc.warnings, err);
  const auto& anim = doc.animation;
  std::optional<TrackSet> tracks;
  if (!a.tracks.empty()) tracks = load_tracks(a.tracks);
  LossWeights weights{a.w_s, 0.0, tracks ? a.w_c : 0.0};
  const auto targets = doc.attachment_targets.empty() ? stroke_midpoints(anim) : doc.attachment_targets;
  // A placeholder track set is never read when the consistency weight is zero.
  const TrackSet placeholder(anim.num_frames(),
                             {TrackedPoint{0, std::vector<Vec2>(anim.num_frames())}});
  const double worst = finite_difference_check(anim, tracks ? *tracks : placeholder, targets,
                                               weights, a.samples, a.step);
  out << "max_relative_error " << format_scientific(worst) << "\n";
  return kExitOk;
}

struct GenTracksArgs {
  std::string out;
  synthetic::ComplexMotionConfig config;
};

inline int run_gen_tracks(const GenTracksArgs& a, std::ostream& out, std::ostream&) {
  const auto tracks = synthetic::complex_motion_tracks(a.config);
  write_text_file(a.out, track_format_for(a.out) == TrackFormat::Csv ? tracks_to_csv(tracks)
                                                                     : tracks_to_json(tracks));
  out << "wrote " << a.out << " (" << tracks.size() << " tracks, " << tracks.num_frames()
      << " frames)\n";
  return kExitOk;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Polynomial motion trajectories for animated vector sketches", "dmt"};
  app.require_subcommand(1);

  detail::FitBenchArgs fb;
  auto* fit_bench = app.add_subcommand("fit-bench", "Compare interpolation, least squares and ridge fits");
  fit_bench->add_option("--tracks", fb.tracks, "Track file (.json or .csv)")->required();
  fit_bench->add_option("--lambda", fb.lambda, "Ridge penalty")->capture_default_str();
  fit_bench->add_option("--basis", fb.basis, "bernstein or power")->capture_default_str();
  fit_bench->add_option("--configs", fb.configs, "frames:degree list, e.g. 50:24,100:49");
  fit_bench->add_option("--csv", fb.csv, "Write CSV here instead of stdout");
  fit_bench->add_option("--markdown", fb.markdown, "Also write an aligned markdown table");

  detail::InitArgs in;
  auto* init = app.add_subcommand("init", "Initialize an animation from tracks and guidance maps");
  init->add_option("--tracks", in.tracks, "Track file (.json or .csv)")->required();
  init->add_option("--out", in.out, "Model file to write")->required();
  init->add_option("--strokes", in.config.num_strokes, "Number of strokes")->capture_default_str();
  init->add_option("--degree", in.config.trajectory_degree, "Trajectory degree (default ceil(N_f/2)-1)");
  init->add_option("--curve-degree", in.config.curve_degree, "Bezier degree")->capture_default_str();
  init->add_option("--beta", in.config.beta, "Motion weight in the density map")->capture_default_str();
  init->add_option("--lambda", in.config.ridge_lambda, "Ridge penalty")->capture_default_str();
  init->add_option("--seed", in.config.rng_seed, "Random seed")->capture_default_str();
  init->add_option("--span", in.config.initial_stroke_span, "Initial stroke length in pixels");
  init->add_option("--basis", in.basis, "bernstein or power")->capture_default_str();
  init->add_option("--width", in.width, "Canvas width when no map is given (default 512)");
  init->add_option("--height", in.height, "Canvas height when no map is given (default 512)");
  init->add_option("--xdog", in.xdog, "Edge map (PGM)");
  init->add_option("--attention", in.attention, "Attention map (PGM)");
  init->add_option("--bandwidth", in.bandwidth, "Motion heatmap kernel width (default 0.05*max(W,H))");
  init->add_option("--mask-areas", in.mask_areas, "frame,area_pixels CSV for the width schedule");
  init->add_option("--mask-area", in.mask_area, "constant mask area in pixels for every frame");
  init->add_option("--w-max", in.w_max, "Maximum stroke width")->capture_default_str();

  detail::OptimizeArgs op;
  auto* optimize = app.add_subcommand("optimize", "Optimize trajectories against the tracks");
  optimize->add_option("--model", op.model, "Input model")->required();
  optimize->add_option("--tracks", op.tracks, "Track file")->required();
  optimize->add_option("--out", op.out, "Output model")->required();
  optimize->add_option("--log", op.log, "Loss history CSV");
  optimize->add_option("--iterations", op.config.iterations)->capture_default_str();
  optimize->add_option("--step", op.config.step_size)->capture_default_str();
  optimize->add_option("--samples", op.config.n_p, "Samples per stroke")->capture_default_str();
  optimize->add_option("--log-every", op.config.log_every)->capture_default_str();
  optimize->add_option("--w-s", op.weights.w_s, "Attachment weight")->capture_default_str();
  optimize->add_option("--w-g", op.weights.w_g, "Geometry weight (needs a loss plugin)")->capture_default_str();
  optimize->add_option("--w-c", op.weights.w_c, "Consistency weight")->capture_default_str();

  detail::ExportArgs ex;
  auto* exp = app.add_subcommand("export", "Write per-frame SVGs or one animated SVG");
  exp->add_option("--model", ex.model, "Model file")->required();
  exp->add_option("--frames", ex.frames, "Directory for frame_00000.svg ...");
  exp->add_option("--svg", ex.svg, "Animated SVG file");
  exp->add_option("--fps", ex.fps, "Playback rate of the animated SVG")->capture_default_str();

  detail::InterpArgs ip;
  auto* interp = app.add_subcommand("interp", "Animated SVG at a different frame rate");
  interp->add_option("--model", ip.model, "Model file")->required();
  interp->add_option("--in-fps", ip.in_fps, "Frame rate of the source frames")->required();
  interp->add_option("--out-fps", ip.out_fps, "Frame rate of the output")->required();
  interp->add_option("--svg", ip.svg, "Animated SVG file")->required();

  detail::CheckGradArgs cg;
  auto* check = app.add_subcommand("check-grad", "Compare analytic and finite-difference gradients");
  check->add_option("--model", cg.model, "Model file")->required();
  check->add_option("--tracks", cg.tracks, "Track file; enables the consistency term");
  check->add_option("--samples", cg.samples)->capture_default_str();
  check->add_option("--step", cg.step, "Central-difference step in pixels")->capture_default_str();
  check->add_option("--w-s", cg.w_s)->capture_default_str();
  check->add_option("--w-c", cg.w_c)->capture_default_str();

  detail::GenTracksArgs gt;
  auto* gen = app.add_subcommand("gen-tracks", "Write synthetic complex-motion tracks");
  gen->add_option("--out", gt.out, "Track file (.json or .csv)")->required();
  gen->add_option("--points", gt.config.num_points)->capture_default_str();
  gen->add_option("--frames", gt.config.num_frames)->capture_default_str();
  gen->add_option("--seed", gt.config.seed)->capture_default_str();
  gen->add_option("--spread", gt.config.spread)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*fit_bench) return detail::run_fit_bench(fb, out, err);
    if (*init) return detail::run_init(in, out, err);
    if (*optimize) return detail::run_optimize(op, out, err);
    if (*exp) return detail::run_export(ex, out, err);
    if (*interp) return detail::run_interp(ip, out, err);
    if (*check) return detail::run_check_grad(cg, out, err);
    if (*gen) return detail::run_gen_tracks(gt, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const UnsupportedVersionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace dmt
