// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Subcommands of the splinevol tool. run_cli() is the whole program minus
// main(), so tests can drive it in-process.
//
// Exit codes: 0 success, 1 usage or configuration, 2 I/O or file format,
// 3 numerical failure (fit, domain, render).

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "options.hpp"
#include "splinevol/splinevol.hpp"

namespace splinevol::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kExitIo;
  return kExitNumerical;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string join3(const std::array<int, 3>& a) {
  return std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

/// Warning text when a fit is close to interpolating with a high degree, a
/// setting prone to boundary oscillation. Empty when no risk is detected.
inline std::string runge_warning(const std::array<int, 3>& degree, const std::array<int, 3>& nctrl, const Dims& dims) {
  for (std::size_t d = 0; d < 3; ++d)
    if (degree[d] >= 3 && static_cast<double>(nctrl[d]) >= 0.9 * static_cast<double>(dims[d]))
      return "warning: Runge risk in dimension " + std::to_string(d) + ": degree " + std::to_string(degree[d]) +
             " with nctrl " + std::to_string(nctrl[d]) + " of " + std::to_string(dims[d]) +
             " samples may oscillate near the domain boundary";
  return {};
}

inline std::string format_report(const RefinementReport& r) {
  std::ostringstream os;
  for (const auto& rd : r.rounds)
    os << "round " << rd.round << " nctrl=" << join3(rd.nctrl) << " spans=" << join3(rd.spans)
       << " max_rel_error=" << fmt("%.6e", rd.max_error) << " splits=" << rd.splits << "\n";
  os << "status=" << (r.converged ? "converged" : "capped") << " reason=" << r.stop_reason << "\n";
  os << "final_error=" << fmt("%.6e", r.final_error()) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// sources selected on the command line

struct SourceSelector {
  std::string model_path;
  std::string grid_path;
  std::string filter = "trilinear";
  std::string analytic;
  std::string analytic_values;
};

struct LoadedSource {
  std::optional<MfaModel> model;
  std::optional<ScalarGrid> grid;
  std::optional<AnalyticField> field;
  FilterKind filter = FilterKind::trilinear;
  Box bounds;
  std::pair<double, double> range{0.0, 1.0};
};

/// Calls fn(source) with the concrete source type matching `src`.
template <class Fn>
decltype(auto) with_source(const LoadedSource& src, Fn&& fn) {
  if (src.model) return fn(MfaSource(*src.model));
  if (src.grid) {
    switch (src.filter) {
      case FilterKind::trilinear: return fn(TrilinearSource(*src.grid));
      case FilterKind::tricubic: return fn(TricubicSource(*src.grid));
      case FilterKind::catmull_rom: return fn(CatmullRomSource(*src.grid));
    }
  }
  return fn(AnalyticSource<AnalyticField>(*src.field, src.bounds));
}

inline AnalyticField make_field(const std::string& name) {
  AnalyticField f{field_by_name(name)};
  std::visit([](const auto& s) { s.validate(); }, f.spec);
  return f;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string field = "gaussian-beam";
  std::string dims;
  long count = 0;
  std::string bounds = "-1,1";
  std::uint64_t seed = 1;
  std::string out;
};

inline void add_synth(CLI::App& app, SynthArgs& a) {
  app.add_option("--field", a.field, "gaussian-beam | marschner-lobb | multi-beam | constant");
  app.add_option("--dims", a.dims, "grid samples per axis nx,ny,nz (one value broadcasts)");
  app.add_option("--count", a.count, "number of scattered samples instead of a grid");
  app.add_option("--bounds", a.bounds, "domain x0,y0,z0,x1,y1,z1 or lo,hi");
  app.add_option("--seed", a.seed, "RNG seed for scattered samples");
  app.add_option("--out", a.out, "output raw volume (sidecar .meta added) or point file")->required();
}

inline int run_synth(const SynthArgs& a, std::ostream& out) {
  const AnalyticField field = make_field(a.field);
  const Box bounds = parse_box(a.bounds, "bounds");
  if (a.dims.empty() == (a.count == 0))
    throw ConfigError(a.dims.empty() ? "missing --dims (or --count for scattered samples)"
                                     : "--dims and --count are mutually exclusive");
  if (a.count < 0) throw ConfigError("--count must be positive");
  if (!a.dims.empty()) {
    const auto d = parse_int3(a.dims, "dims");
    for (int n : d)
      if (n < 2) throw ConfigError("--dims entries must be >= 2");
    const ScalarGrid g = sample_grid(field, {static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]),
                                             static_cast<std::size_t>(d[2])},
                                     bounds);
    write_raw_volume(g, a.out);
    out << "wrote " << a.out << " (" << join3(d) << " samples) and " << sidecar_path(a.out) << "\n";
  } else {
    const PointCloud pc = sample_scattered(field, static_cast<std::size_t>(a.count), bounds, a.seed);
    write_point_cloud(pc, a.out);
    out << "wrote " << a.out << " (" << a.count << " points)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// encode

struct EncodeArgs {
  std::string input;
  std::string points;
  std::string degree = "2";
  std::string nctrl = "3";
  bool adaptive = false;
  double e_max = 0.01;
  int max_rounds = 10;
  std::string max_ctrl;
  std::string bounds;
  std::string out;
  std::string report;
};

inline void add_encode(CLI::App& app, EncodeArgs& a) {
  app.add_option("--input", a.input, "raw volume with .meta sidecar");
  app.add_option("--points", a.points, "scattered point file (x y z value per line)");
  app.add_option("--degree", a.degree, "degree per dimension (one value broadcasts)");
  app.add_option("--nctrl", a.nctrl, "control points per dimension (initial counts when adaptive)");
  app.add_flag("--adaptive", a.adaptive, "refine knots until the error tolerance is met");
  app.add_option("--e-max", a.e_max, "max relative error tolerance for --adaptive");
  app.add_option("--max-rounds", a.max_rounds, "refinement round cap");
  app.add_option("--max-ctrl", a.max_ctrl, "control count cap per dimension (default: grid dims)");
  app.add_option("--bounds", a.bounds, "domain for --points (default: bounding box)");
  app.add_option("--out", a.out, "output model file")->required();
  app.add_option("--report", a.report, "also write the report to this file");
}

inline int run_encode(const EncodeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.input.empty() == a.points.empty()) throw ConfigError("give exactly one of --input or --points");
  EncodeConfig cfg;
  cfg.degree = parse_int3(a.degree, "degree");
  cfg.nctrl = parse_int3(a.nctrl, "nctrl");
  cfg.adaptive = a.adaptive;
  cfg.e_max = a.e_max;
  cfg.max_rounds = a.max_rounds;
  if (!a.max_ctrl.empty()) cfg.max_ctrl = parse_int3(a.max_ctrl, "max-ctrl");
  cfg.validate();

  std::ostringstream report;
  MfaModel model;
  if (!a.input.empty()) {
    const ScalarGrid g = read_raw_volume(a.input);
    report << "input=" << a.input << " dims=" << g.dims[0] << "," << g.dims[1] << "," << g.dims[2]
           << " degree=" << join3(cfg.degree) << "\n";
    RefinementReport rep;
    if (cfg.adaptive) {
      auto res = adaptive_encode(g, cfg);
      model = std::move(res.model);
      rep = std::move(res.report);
    } else {
      model = fit_grid_separable(g, cfg);
      RefinementRound rd;
      rd.nctrl = model.nctrl;
      for (std::size_t d = 0; d < 3; ++d) rd.spans[d] = model.nctrl[d] - cfg.degree[d];
      rd.max_error = max_relative_error(model, g);
      rep.rounds.push_back(rd);
      rep.converged = true;
      rep.stop_reason = "single fit";
    }
    report << format_report(rep);
    if (const auto w = runge_warning(cfg.degree, model.nctrl, g.dims); !w.empty()) {
      report << w << "\n";
      err << w << "\n";
    }
  } else {
    if (cfg.adaptive) throw ConfigError("--adaptive applies to gridded --input only");
    const PointCloud pc = read_point_cloud(a.points);
    std::optional<Box> box;
    if (!a.bounds.empty()) box = parse_box(a.bounds, "bounds");
    model = fit_scattered_global(pc, cfg, box);
    double max_err = 0.0;
    const double span = model.value_span() > 0.0 ? model.value_span() : 1.0;
    for (std::size_t i = 0; i < pc.size(); ++i)
      max_err = std::max(max_err, std::abs(MfaSource(model).value(pc.points[i]) - pc.values[i]) / span);
    report << "points=" << a.points << " count=" << pc.size() << " degree=" << join3(cfg.degree)
           << " nctrl=" << join3(model.nctrl) << "\n";
    report << "max_rel_error=" << fmt("%.6e", max_err) << "\n";
  }
  save_model(model, a.out);
  out << report.str();
  if (!a.report.empty()) write_text(a.report, report.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
  SourceSelector sel;
  RenderFlags flags;
  bool alpha = false;
  std::string out;
};

inline void add_source_selector(CLI::App& app, SourceSelector& s) {
  app.add_option("--model", s.model_path, "MFAMOD1 model file");
  app.add_option("--grid", s.grid_path, "raw volume rendered with --filter");
  app.add_option("--filter", s.filter, "trilinear | tricubic | catmull-rom");
  app.add_option("--analytic", s.analytic, "analytic field rendered directly (ground truth)");
  app.add_option("--analytic-values", s.analytic_values,
                 "take values from this analytic field and only gradients from the source");
}

/// Loads the selected source. Analytic sources use `bounds` (default [-1,1]^3);
/// file sources must match it when it is given.
inline LoadedSource load_source(const SourceSelector& s, const std::optional<Box>& bounds) {
  const int chosen = !s.model_path.empty() + !s.grid_path.empty() + !s.analytic.empty();
  if (chosen != 1) throw ConfigError("select exactly one of --model, --grid or --analytic");
  LoadedSource src;
  if (!s.model_path.empty()) {
    src.model = load_model(s.model_path);
    src.bounds = src.model->domain;
    src.range = {src.model->value_min, src.model->value_max};
  } else if (!s.grid_path.empty()) {
    src.grid = read_raw_volume(s.grid_path);
    src.filter = filter_by_name(s.filter);
    src.bounds = src.grid->bounds;
    src.range = {src.grid->min_value(), src.grid->max_value()};
  } else {
    src.field = make_field(s.analytic);
    src.bounds = bounds.value_or(Box{});
    src.range = nominal_range(src.field->spec);
    return src;
  }
  if (bounds && !(*bounds == src.bounds))
    throw ConfigError("configured bounds do not match the source bounds");
  return src;
}

/// Renders the selected source, optionally with analytic values and source gradients.
inline ImageRGBA render_selected(const LoadedSource& src, const SourceSelector& sel, const RenderConfig& cfg) {
  if (sel.analytic_values.empty()) return with_source(src, [&](const auto& s) { return render(s, cfg); });
  const AnalyticSource<AnalyticField> values(make_field(sel.analytic_values), src.bounds);
  return with_source(src, [&](const auto& s) { return render(SplitSource(values, s), cfg); });
}

inline void write_image(const ImageRGBA& img, const std::string& path, bool alpha) {
  if (alpha) write_pam(img, path);
  else write_ppm(img, path);
}

inline int run_render(const RenderArgs& a, std::ostream& out) {
  const OptionMap opts = a.flags.merged();
  std::optional<Box> bounds;
  if (auto it = opts.find("bounds"); it != opts.end()) bounds = parse_box(it->second, "bounds");
  const LoadedSource src = load_source(a.sel, bounds);
  std::pair<double, double> range = src.range;
  if (!a.sel.analytic_values.empty()) range = nominal_range(make_field(a.sel.analytic_values).spec);
  const RenderSettings rs = build_render_settings(opts, range);
  const ImageRGBA img = render_selected(src, a.sel, rs.config);
  write_image(img, a.out, a.alpha);
  out << "wrote " << a.out << " (" << img.width << "x" << img.height << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string a, b, heatmap;
};

inline int run_compare(const CompareArgs& c, std::ostream& out) {
  const ImageRGBA a = read_image(c.a);
  const ImageRGBA b = read_image(c.b);
  const QualityReport r = compare_images(a, b);
  out << "mse=" << fmt("%.6f", r.mse) << " psnr=" << (std::isinf(r.psnr) ? std::string("inf") : fmt("%.6f", r.psnr))
      << " ssim=" << fmt("%.8f", r.ssim) << "\n";
  if (!c.heatmap.empty()) write_ppm(error_heatmap(a, b), c.heatmap);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct QueryTiming {
  double value_ns = 0.0;
  double gradient_ns = 0.0;
};

/// Mean wall-clock time per value and per gradient query at `n` seeded
/// random positions inside the source bounds.
template <SampleSource Source>
QueryTiming time_queries(const Source& src, std::size_t n, std::uint64_t seed = 7) {
  const Box b = src.bounds();
  std::mt19937_64 rng(seed);
  std::vector<Vec3> pts(n);
  for (auto& p : pts)
    for (int d = 0; d < 3; ++d) p[d] = b.lo[d] + (b.hi[d] - b.lo[d]) * detail::unit_uniform(rng);
  using clock = std::chrono::steady_clock;
  volatile double sink = 0.0;
  auto t0 = clock::now();
  for (const auto& p : pts) sink = sink + src.value(p);
  auto t1 = clock::now();
  for (const auto& p : pts) sink = sink + src.gradient(p).x;
  auto t2 = clock::now();
  const double dn = static_cast<double>(n);
  return {std::chrono::duration<double, std::nano>(t1 - t0).count() / dn,
          std::chrono::duration<double, std::nano>(t2 - t1).count() / dn};
}

struct SweepArgs {
  std::string field = "marschner-lobb";
  std::string dims = "64";
  std::string nctrl;
  std::string degree;
  std::string bounds = "-1,1";
  std::size_t queries = 20000;
  RenderFlags flags;
  std::string out;
};

inline int run_sweep(const SweepArgs& a, std::ostream& out) {
  const auto nctrl_list = parse_int_list(a.nctrl, "nctrl");
  const auto degree_list = parse_int_list(a.degree, "degree");
  const auto d = parse_int3(a.dims, "dims");
  for (int n : d)
    if (n < 2) throw ConfigError("--dims entries must be >= 2");
  const AnalyticField field = make_field(a.field);
  const Box bounds = parse_box(a.bounds, "bounds");
  const ScalarGrid g = sample_grid(
      field, {static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]), static_cast<std::size_t>(d[2])}, bounds);
  const RenderSettings rs = build_render_settings(a.flags.merged(), nominal_range(field.spec));
  const ImageRGBA truth = render(AnalyticSource<AnalyticField>(field, bounds), rs.config);

  std::ostringstream table;
  table << "# field=" << a.field << " dims=" << join3(d) << "\n";
  table << "nctrl degree mse psnr ssim value_ns gradient_ns\n";
  for (int n : nctrl_list)
    for (int p : degree_list) {
      EncodeConfig cfg;
      cfg.degree = {p, p, p};
      cfg.nctrl = {std::min(n, d[0]), std::min(n, d[1]), std::min(n, d[2])};
      const MfaModel m = fit_grid_separable(g, cfg);
      const MfaSource src(m);
      const QualityReport q = compare_images(truth, render(src, rs.config));
      const QueryTiming t = time_queries(src, a.queries);
      table << n << " " << p << " " << fmt("%.6f", q.mse) << " "
            << (std::isinf(q.psnr) ? std::string("inf") : fmt("%.6f", q.psnr)) << " " << fmt("%.8f", q.ssim) << " "
            << fmt("%.1f", t.value_ns) << " " << fmt("%.1f", t.gradient_ns) << "\n";
    }
  out << table.str();
  if (!a.out.empty()) write_text(a.out, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string field = "gaussian-beam";
  std::string sources = "trilinear,mfa,tricubic,catmull-rom";
  std::string sizes = "16,32,64";
  std::string degree = "2";
  int reps = 5;
  RenderFlags flags;
  std::string out;
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median wall-clock seconds over `reps` renders of `src`.
template <SampleSource Source>
double time_render(const Source& src, const RenderConfig& cfg, int reps) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const ImageRGBA img = render(src, cfg);
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (img.pixels.empty()) throw InternalError("empty render");
  }
  return median(t);
}

inline int run_bench(const BenchArgs& a, std::ostream& out) {
  if (a.reps < 1) throw ConfigError("--reps must be >= 1");
  const auto sizes = parse_int_list(a.sizes, "sizes");
  const int degree = parse_int(a.degree, "degree");
  std::vector<std::string> sources = split(a.sources, ',');
  for (const auto& s : sources)
    if (s != "analytic" && s != "mfa") filter_by_name(s);
  const AnalyticField field = make_field(a.field);
  const Box bounds;
  const RenderSettings rs = build_render_settings(a.flags.merged(), nominal_range(field.spec));

  std::ostringstream table;
  table << "source size median_ms\n";
  for (int n : sizes) {
    if (n < 2) throw ConfigError("--sizes entries must be >= 2");
    const auto un = static_cast<std::size_t>(n);
    const ScalarGrid g = sample_grid(field, {un, un, un}, bounds);
    std::optional<MfaModel> model;
    for (const auto& s : sources) {
      double secs;
      if (s == "analytic") {
        secs = time_render(AnalyticSource<AnalyticField>(field, bounds), rs.config, a.reps);
      } else if (s == "mfa") {
        if (!model) {
          EncodeConfig cfg;
          cfg.degree = {degree, degree, degree};
          cfg.nctrl = {n, n, n};
          model = fit_grid_separable(g, cfg);
        }
        secs = time_render(MfaSource(*model), rs.config, a.reps);
      } else {
        LoadedSource ls;
        ls.grid = g;
        ls.filter = filter_by_name(s);
        secs = with_source(ls, [&](const auto& src) { return time_render(src, rs.config, a.reps); });
      }
      table << s << " " << n << " " << fmt("%.3f", secs * 1e3) << "\n";
    }
  }
  out << table.str();
  if (!a.out.empty()) write_text(a.out, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"splinevol: B-spline volume models and ray-cast rendering"};
  app.require_subcommand(1);

  SynthArgs synth;
  add_synth(*app.add_subcommand("synth", "sample an analytic field to a grid or point cloud"), synth);

  EncodeArgs encode;
  add_encode(*app.add_subcommand("encode", "fit a B-spline model to a grid or point cloud"), encode);

  RenderArgs rend;
  auto* rs = app.add_subcommand("render", "ray-cast a model, filtered grid or analytic field");
  add_source_selector(*rs, rend.sel);
  rend.flags.add_to(*rs);
  rs->add_flag("--alpha", rend.alpha, "write PAM with alpha instead of PPM");
  rs->add_option("--out", rend.out, "output image")->required();

  CompareArgs cmp;
  auto* cs = app.add_subcommand("compare", "MSE / PSNR / SSIM between two images");
  cs->add_option("a", cmp.a, "reference image")->required();
  cs->add_option("b", cmp.b, "test image")->required();
  cs->add_option("--heatmap", cmp.heatmap, "write the per-pixel error heatmap (PPM)");

  SweepArgs sweep;
  auto* ss = app.add_subcommand("sweep", "quality and query time over nctrl x degree");
  ss->add_option("--field", sweep.field, "analytic field");
  ss->add_option("--dims", sweep.dims, "grid samples per axis");
  ss->add_option("--bounds", sweep.bounds, "domain");
  ss->add_option("--nctrl", sweep.nctrl, "comma list of control counts")->required();
  ss->add_option("--degree", sweep.degree, "comma list of degrees")->required();
  ss->add_option("--queries", sweep.queries, "random queries for the timing columns");
  ss->add_option("--out", sweep.out, "write the table to this file");
  // sweep shares render keys except bounds, which is a field option here
  for (const auto& [key, help] : render_keys())
    if (key != "bounds") sweep.flags.options[key] = ss->add_option("--" + key, sweep.flags.values[key], help);
  ss->add_option("--config", sweep.flags.config_path, "render config file (key = value)");

  BenchArgs bench;
  auto* bs = app.add_subcommand("bench", "median render time per source and grid size");
  bs->add_option("--field", bench.field, "analytic field");
  bs->add_option("--sources", bench.sources, "comma list of analytic | mfa | trilinear | tricubic | catmull-rom");
  bs->add_option("--sizes", bench.sizes, "comma list of grid sizes (cubed)");
  bs->add_option("--degree", bench.degree, "MFA degree (nctrl equals the grid size)");
  bs->add_option("--reps", bench.reps, "repetitions per measurement");
  bs->add_option("--out", bench.out, "write the table to this file");
  for (const auto& [key, help] : render_keys())
    if (key != "bounds") bench.flags.options[key] = bs->add_option("--" + key, bench.flags.values[key], help);
  bs->add_option("--config", bench.flags.config_path, "render config file (key = value)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("synth")) return run_synth(synth, out);
    if (app.got_subcommand("encode")) return run_encode(encode, out, err);
    if (app.got_subcommand("render")) return run_render(rend, out);
    if (app.got_subcommand("compare")) return run_compare(cmp, out);
    if (app.got_subcommand("sweep")) return run_sweep(sweep, out);
    if (app.got_subcommand("bench")) return run_bench(bench, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace splinevol::cli
