#pragma once

// Power-law fitting and the overshoot / liquidity-volatility statistics built
// on top of multi-threshold runs.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "itime/core.hpp"
#include "itime/multiscale.hpp"

namespace itime {

/// Sample mean of the squared values.
inline double squared_mean(std::span<const double> values) {
  if (values.empty()) {
    throw EmptyInputError("squared_mean of an empty list");
  }
  double acc = 0.0;
  for (double v : values) {
    acc += v * v;
  }
  return acc / static_cast<double>(values.size());
}

struct PowerLawPoint {
  double x = 0.0;
  double y = 0.0;
};

/// y = a * x^b, fitted by ordinary least squares on (ln x, ln y).
struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  double stderr_b = 0.0;
  std::size_t n_points = 0;

  [[nodiscard]] double operator()(double x) const { return a * std::pow(x, b); }
};

inline ScalingFit fit_power_law(std::span<const PowerLawPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) {
    throw FitError("power-law fit needs at least 2 points");
  }
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(points[i].x > 0.0) || !(points[i].y > 0.0)) {
      throw FitError("power-law fit needs strictly positive coordinates");
    }
    lx[i] = std::log(points[i].x);
    ly[i] = std::log(points[i].y);
  }
  {
    std::vector<double> sorted = lx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw FitError("power-law fit needs distinct x values");
    }
  }

  ScalingFit fit;
  fit.n_points = n;
  const double dn = static_cast<double>(n);

  // Constant y is an exact b = 0 law.
  if (std::all_of(points.begin(), points.end(), [&](const PowerLawPoint& p) { return p.y == points[0].y; })) {
    fit.a = points[0].y;
    fit.b = 0.0;
    fit.r_squared = 1.0;
    fit.stderr_b = 0.0;
    return fit;
  }

  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / dn;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / dn;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.b = sxy / sxx;
  const double intercept = my - fit.b * mx;
  fit.a = std::exp(intercept);

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + fit.b * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  // Two points determine the line exactly and leave no residual dof.
  fit.stderr_b = n > 2 ? std::sqrt(ss_res / (dn - 2.0) / sxx) : 0.0;
  return fit;
}

/// mean(omega) / delta; close to 1 when overshoots average one threshold.
inline double mean_overshoot_ratio(std::span<const double> overshoot_lengths, double delta) {
  if (overshoot_lengths.empty()) {
    throw EmptyInputError("no overshoot lengths");
  }
  ThresholdConfig{delta, MoveConvention::Relative}.validate();
  const double mean = std::accumulate(overshoot_lengths.begin(), overshoot_lengths.end(), 0.0) /
                      static_cast<double>(overshoot_lengths.size());
  return mean / delta;
}

struct ReturnSeries {
  Nanos dt = 0;
  std::vector<double> returns;
};

/// Samples the last price at or before t0, t0 + dt, t0 + 2dt, ... and returns
/// consecutive moves between samples.
inline ReturnSeries physical_returns(std::span<const Tick> ticks, Nanos dt, MoveConvention convention) {
  if (dt <= 0) {
    throw ConfigError("sampling interval must be positive");
  }
  if (ticks.empty()) {
    throw InsufficientDataError("no ticks to sample");
  }
  const Nanos t0 = ticks.front().timestamp_ns;
  const Nanos span = ticks.back().timestamp_ns - t0;
  if (span / 2 < dt) {
    throw InsufficientDataError("tick span " + std::to_string(span) + " ns is shorter than two sampling intervals");
  }

  ReturnSeries out;
  out.dt = dt;
  out.returns.reserve(static_cast<std::size_t>(span / dt));
  std::size_t idx = 0;
  double prev = ticks.front().price;
  for (Nanos t = t0 + dt; t - t0 <= span; t += dt) {
    while (idx + 1 < ticks.size() && ticks[idx + 1].timestamp_ns <= t) {
      ++idx;
    }
    const double cur = ticks[idx].price;
    out.returns.push_back(relative_move(prev, cur, convention));
    prev = cur;
  }
  return out;
}

struct DecompositionRow {
  double delta = 0.0;
  std::uint64_t n_dc = 0;
  std::size_t n_segments = 0;     // completed overshoot segments
  double os_variability = 0.0;    // squared mean of (omega - delta)
  double rhs = 0.0;               // os_variability * n_dc
  std::optional<double> ratio;    // lhs / rhs, when rhs > 0
  bool insufficient = false;      // fewer than 2 completed segments
};

struct DecompositionReport {
  double lhs = 0.0;  // squared mean of physical-time returns
  std::size_t n_returns = 0;
  std::vector<DecompositionRow> rows;
  std::optional<double> ratio_cv;  // over rows with a defined ratio
  bool degenerate = false;         // no activity: lhs == 0 or no DC at any threshold
};

inline constexpr std::size_t kMinOvershootSegments = 2;

/// Population coefficient of variation; 0 for a single value.
inline double coefficient_of_variation(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / n) / mean;
}

inline DecompositionReport decompose(std::span<const Tick> ticks, const ThresholdGrid& grid, Nanos dt,
                                     MoveConvention convention, Mode initial_mode = Mode::Up,
                                     unsigned threads = default_thread_count()) {
  DecompositionReport report;
  const ReturnSeries returns = physical_returns(ticks, dt, convention);
  report.lhs = squared_mean(returns.returns);
  report.n_returns = returns.returns.size();

  report.rows.resize(grid.size());
  detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
    const double delta = grid[i];
    const ThresholdConfig config{delta, convention};
    const std::vector<IntrinsicEvent> events = process(ticks, config, initial_mode);
    const ThresholdSummary summary = summarize(delta, events, ticks, convention);

    DecompositionRow& row = report.rows[i];
    row.delta = delta;
    row.n_dc = summary.n_dc;
    row.n_segments = summary.overshoot_lengths.size();
    if (row.n_segments < kMinOvershootSegments) {
      row.insufficient = true;
      return;
    }
    std::vector<double> residuals(summary.overshoot_lengths);
    for (double& r : residuals) {
      r -= delta;
    }
    row.os_variability = squared_mean(residuals);
    row.rhs = row.os_variability * static_cast<double>(row.n_dc);
    if (row.rhs > 0.0) {
      row.ratio = report.lhs / row.rhs;
    }
  });

  std::vector<double> ratios;
  bool any_dc = false;
  for (const DecompositionRow& row : report.rows) {
    any_dc = any_dc || row.n_dc > 0;
    if (!row.insufficient && row.ratio) {
      ratios.push_back(*row.ratio);
    }
  }
  report.degenerate = report.lhs == 0.0 || !any_dc;
  if (!ratios.empty()) {
    report.ratio_cv = coefficient_of_variation(ratios);
  }
  return report;
}

}  // namespace itime
