#pragma once

// Command-line front end: generate | transform | scaling | decompose.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itime/core.hpp"
#include "itime/dc_engine.hpp"
#include "itime/io.hpp"
#include "itime/multiscale.hpp"
#include "itime/scaling_stats.hpp"
#include "itime/synthetic.hpp"

namespace itime::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Comma-separated plain fractions ("0.001,0.005"), returned ascending.
inline ThresholdGrid parse_deltas(const std::string& text) {
  std::vector<double> deltas;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view field = rest.substr(0, comma);
    double v = 0.0;
    if (!detail::parse_number(field, v)) {
      throw UsageError("invalid threshold `" + std::string(detail::trim(field)) + "` in --deltas");
    }
    deltas.push_back(v);
    if (comma == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(comma + 1);
  }
  std::sort(deltas.begin(), deltas.end());
  try {
    return ThresholdGrid(std::move(deltas));
  } catch (const ConfigError& e) {
    throw UsageError(std::string("--deltas: ") + e.what());
  }
}

struct InputOptions {
  std::string path;
  std::string unit = "ns";
  std::string header = "auto";
  bool allow_unordered = false;

  void attach(CLI::App& app) {
    app.add_option("--in", path, "tick CSV (timestamp,price)")->required()->check(CLI::ExistingFile);
    app.add_option("--unit", unit, "timestamp unit of the tick file")
        ->check(CLI::IsMember({"s", "ms", "ns"}))
        ->capture_default_str();
    app.add_option("--header", header, "whether the first data line is a header")
        ->check(CLI::IsMember({"auto", "yes", "no"}))
        ->capture_default_str();
    app.add_flag("--allow-unordered", allow_unordered, "stable-sort rows by timestamp instead of rejecting");
  }

  [[nodiscard]] std::vector<Tick> load() const {
    TickFileSpec spec;
    spec.path = path;
    spec.timestamp_unit = unit == "s" ? TimestampUnit::Seconds : unit == "ms" ? TimestampUnit::Millis : TimestampUnit::Nanos;
    if (header == "auto") {
      std::ifstream in(path);
      spec.has_header = sniff_header(in);
    } else {
      spec.has_header = header == "yes";
    }
    std::vector<Tick> ticks = parse_ticks(spec, IngestOptions{!allow_unordered});
    if (ticks.empty()) {
      throw EmptyInputError("tick file " + path + " has no data rows");
    }
    return ticks;
  }
};

inline MoveConvention parse_convention(const std::string& s) {
  return s == "log" ? MoveConvention::LogReturn : MoveConvention::Relative;
}

inline void add_convention(CLI::App& app, std::string& target) {
  app.add_option("--convention", target, "price move convention")
      ->check(CLI::IsMember({"relative", "log"}))
      ->capture_default_str();
}

inline std::string delta_label(double delta) { return format_shortest(delta); }

// --- generate ---------------------------------------------------------------

struct GenerateCommand {
  std::string model;
  double s0 = 100.0;
  double mu = 0.0;
  double sigma = 0.0;
  double step = 2e-4;
  std::uint64_t steps = 0;
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::string out;

  void attach(CLI::App& app) {
    app.add_option("--model", model, "gbm or walk")->required()->check(CLI::IsMember({"gbm", "walk"}));
    app.add_option("--s0", s0, "initial price")->capture_default_str();
    app.add_option("--mu", mu, "gbm drift per second")->capture_default_str();
    app.add_option("--sigma", sigma, "gbm volatility per sqrt(second)")->capture_default_str();
    app.add_option("--step", step, "walk log-price step")->capture_default_str();
    app.add_option("--steps", steps, "number of steps")->required();
    app.add_option("--dt", dt, "seconds between ticks")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--out", out, "output tick CSV")->required();
  }

  int run(std::ostream& log) const {
    std::vector<Tick> ticks;
    try {
      if (model == "gbm") {
        ticks = generate_gbm(GbmParams{s0, mu, sigma, dt, steps, seed});
      } else {
        ticks = generate_random_walk(s0, step, steps, seed, dt);
      }
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    write_ticks(ticks, std::filesystem::path(out));
    log << "wrote " << ticks.size() << " ticks to " << out << '\n';
    return kExitOk;
  }
};

// --- transform --------------------------------------------------------------

struct TransformCommand {
  InputOptions input;
  std::string deltas;
  std::string convention = "relative";
  std::string out_dir;
  std::string format = "csv";
  std::string initial_mode = "up";

  void attach(CLI::App& app) {
    input.attach(app);
    app.add_option("--deltas", deltas, "comma-separated thresholds, e.g. 0.001,0.005")->required();
    add_convention(app, convention);
    app.add_option("--out-dir", out_dir, "directory for event files and summary.csv")->required();
    app.add_option("--format", format, "event file format")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
    app.add_option("--initial-mode", initial_mode, "starting mode of every runner")
        ->check(CLI::IsMember({"up", "down"}))
        ->capture_default_str();
  }

  int run(std::ostream& out) const {
    const ThresholdGrid grid = parse_deltas(deltas);
    const std::vector<Tick> ticks = input.load();
    const MoveConvention conv = parse_convention(convention);
    const Mode mode = initial_mode == "down" ? Mode::Down : Mode::Up;
    const std::vector<GridRun> runs = run_grid(ticks, grid, conv, mode);

    std::filesystem::create_directories(out_dir);
    const EventFormat fmt = format == "jsonl" ? EventFormat::JsonLines : EventFormat::Csv;
    const std::string ext = format == "jsonl" ? ".jsonl" : ".csv";

    // Every file is staged first so a failure leaves no partial output.
    std::vector<std::unique_ptr<AtomicFile>> staged;
    std::vector<ThresholdSummary> summaries;
    for (const GridRun& run : runs) {
      auto file = std::make_unique<AtomicFile>(std::filesystem::path(out_dir) / ("events_" + delta_label(run.delta) + ext));
      write_events(run.events, file->stream(), fmt);
      staged.push_back(std::move(file));
      summaries.push_back(summarize(run.delta, run.events));
    }
    auto summary_file = std::make_unique<AtomicFile>(std::filesystem::path(out_dir) / "summary.csv");
    write_summary(summaries, summary_file->stream());
    staged.push_back(std::move(summary_file));
    for (auto& f : staged) {
      f->commit();
    }
    write_summary(summaries, out);
    return kExitOk;
  }
};

// --- scaling ----------------------------------------------------------------

struct ScalingCommand {
  InputOptions input;
  std::string deltas;
  std::string convention = "relative";
  std::string out;

  void attach(CLI::App& app) {
    input.attach(app);
    app.add_option("--deltas", deltas, "comma-separated thresholds")->required();
    add_convention(app, convention);
    app.add_option("--out", out, "optional CSV with per-threshold rows and the fit");
  }

  int run(std::ostream& os) const {
    const ThresholdGrid grid = parse_deltas(deltas);
    const std::vector<Tick> ticks = input.load();
    const MoveConvention conv = parse_convention(convention);
    const std::vector<GridRun> runs = run_grid(ticks, grid, conv);

    std::vector<ThresholdSummary> summaries;
    std::vector<PowerLawPoint> points;
    for (const GridRun& run : runs) {
      summaries.push_back(summarize(run.delta, run.events, ticks, conv));
      if (summaries.back().n_dc > 0) {
        points.push_back({run.delta, static_cast<double>(summaries.back().n_dc)});
      }
    }
    if (points.size() < 2) {
      throw FitError("fewer than 2 thresholds produced any directional change; cannot fit N(delta)");
    }
    const ScalingFit fit = fit_power_law(points);

    std::ostringstream body;
    body << "# schema: itime.scaling v1\n";
    body << "# fit N(delta) = a * delta^b over " << fit.n_points << " thresholds\n";
    body << "# a=" << format_double(fit.a) << '\n';
    body << "# b=" << format_double(fit.b) << '\n';
    body << "# r_squared=" << format_double(fit.r_squared) << '\n';
    body << "# stderr_b=" << format_double(fit.stderr_b) << '\n';
    body << "delta,n_dc,n_os,coastline,n_segments,mean_overshoot_ratio\n";
    for (const ThresholdSummary& s : summaries) {
      body << delta_label(s.delta) << ',' << s.n_dc << ',' << s.n_os << ',' << format_double(s.coastline) << ','
           << s.overshoot_lengths.size() << ',';
      if (!s.overshoot_lengths.empty()) {
        body << format_double(mean_overshoot_ratio(s.overshoot_lengths, s.delta));
      }
      body << '\n';
    }
    if (!out.empty()) {
      AtomicFile file{std::filesystem::path(out)};
      file.stream() << body.str();
      file.commit();
    }

    os << "power-law fit N(delta) = a * delta^b\n";
    os << "  a         = " << format_double(fit.a) << '\n';
    os << "  b         = " << format_double(fit.b) << '\n';
    os << "  r_squared = " << format_double(fit.r_squared) << '\n';
    os << "  stderr_b  = " << format_double(fit.stderr_b) << '\n';
    os << "  n_points  = " << fit.n_points << '\n';
    os << "mean overshoot ratio <omega>/delta\n";
    for (const ThresholdSummary& s : summaries) {
      os << "  delta=" << delta_label(s.delta) << " n_dc=" << s.n_dc << " ratio=";
      if (s.overshoot_lengths.empty()) {
        os << "n/a";
      } else {
        os << format_double(mean_overshoot_ratio(s.overshoot_lengths, s.delta));
      }
      os << '\n';
    }
    return kExitOk;
  }
};

// --- decompose --------------------------------------------------------------

struct DecomposeCommand {
  InputOptions input;
  std::string deltas;
  std::string convention = "relative";
  double dt_seconds = 0.0;
  std::string out;
  std::string summary_out;

  void attach(CLI::App& app) {
    input.attach(app);
    app.add_option("--deltas", deltas, "comma-separated thresholds")->required();
    add_convention(app, convention);
    app.add_option("--dt-seconds", dt_seconds, "physical-time sampling interval")->required();
    app.add_option("--out", out, "report CSV")->required();
    app.add_option("--summary-out", summary_out, "optional copy of the human-readable summary");
  }

  int run(std::ostream& os) const {
    const ThresholdGrid grid = parse_deltas(deltas);
    const double dt_ns = dt_seconds * 1e9;
    if (!(dt_ns >= 1.0) || dt_ns > 9.0e18) {
      throw UsageError("--dt-seconds must be at least 1 ns");
    }
    const std::vector<Tick> ticks = input.load();
    const DecompositionReport report =
        decompose(ticks, grid, static_cast<Nanos>(std::llround(dt_ns)), parse_convention(convention));

    std::ostringstream csv;
    csv << "# schema: itime.decomposition v1\n";
    csv << "# lhs=" << format_double(report.lhs) << '\n';
    csv << "# n_returns=" << report.n_returns << '\n';
    csv << "# ratio_cv=" << (report.ratio_cv ? format_double(*report.ratio_cv) : std::string("n/a")) << '\n';
    csv << "# degenerate=" << (report.degenerate ? "true" : "false") << '\n';
    csv << "delta,n_dc,n_segments,os_variability,rhs,ratio,status\n";
    for (const DecompositionRow& r : report.rows) {
      csv << delta_label(r.delta) << ',' << r.n_dc << ',' << r.n_segments << ',' << format_double(r.os_variability) << ','
          << format_double(r.rhs) << ',' << (r.ratio ? format_double(*r.ratio) : std::string()) << ','
          << (r.insufficient ? "insufficient" : r.ratio ? "ok" : "undefined") << '\n';
    }

    std::ostringstream text;
    text << "mean squared return <r(dt)>_2 = " << format_double(report.lhs) << " over " << report.n_returns
         << " samples (dt = " << format_shortest(dt_seconds) << " s)\n";
    if (report.degenerate) {
      text << "degenerate input: no price activity at the requested thresholds\n";
    }
    for (const DecompositionRow& r : report.rows) {
      text << "  delta=" << delta_label(r.delta) << " n_dc=" << r.n_dc;
      if (r.insufficient) {
        text << " insufficient overshoot segments (" << r.n_segments << ")\n";
        continue;
      }
      text << " <omega-delta>_2=" << format_double(r.os_variability) << " rhs=" << format_double(r.rhs)
           << " ratio=" << (r.ratio ? format_double(*r.ratio) : std::string("n/a")) << '\n';
    }
    text << "ratio_cv = " << (report.ratio_cv ? format_double(*report.ratio_cv) : std::string("n/a")) << '\n';

    std::vector<std::unique_ptr<AtomicFile>> staged;
    staged.push_back(std::make_unique<AtomicFile>(std::filesystem::path(out)));
    staged.back()->stream() << csv.str();
    if (!summary_out.empty()) {
      staged.push_back(std::make_unique<AtomicFile>(std::filesystem::path(summary_out)));
      staged.back()->stream() << text.str();
    }
    for (auto& f : staged) {
      f->commit();
    }
    os << text.str();
    return kExitOk;
  }
};

/// Runs the CLI on `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Directional-change intrinsic time: transform tick data and measure its scaling laws", "itime"};
  app.require_subcommand(1);

  GenerateCommand generate;
  TransformCommand transform;
  ScalingCommand scaling;
  DecomposeCommand decomposition;
  generate.attach(*app.add_subcommand("generate", "write a seeded synthetic tick CSV"));
  transform.attach(*app.add_subcommand("transform", "decompose ticks into DC/OS events per threshold"));
  scaling.attach(*app.add_subcommand("scaling", "fit N(delta) and report mean overshoot ratios"));
  decomposition.attach(*app.add_subcommand("decompose", "liquidity/volatility decomposition of squared returns"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("generate")) {
      return generate.run(out);
    }
    if (app.got_subcommand("transform")) {
      return transform.run(out);
    }
    if (app.got_subcommand("scaling")) {
      return scaling.run(out);
    }
    return decomposition.run(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace itime::cli
