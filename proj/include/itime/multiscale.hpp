#pragma once

// Runs one DcRunner per threshold over a shared, immutable tick buffer.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "itime/core.hpp"
#include "itime/dc_engine.hpp"

namespace itime {

/// Strictly ascending, non-empty list of thresholds in (0, 1).
class ThresholdGrid {
 public:
  explicit ThresholdGrid(std::vector<double> deltas) : deltas_(std::move(deltas)) {
    if (deltas_.empty()) {
      throw ConfigError("threshold grid is empty");
    }
    for (std::size_t i = 0; i < deltas_.size(); ++i) {
      ThresholdConfig{deltas_[i], MoveConvention::Relative}.validate();
      if (i > 0 && !(deltas_[i] > deltas_[i - 1])) {
        throw ConfigError(deltas_[i] == deltas_[i - 1] ? "duplicate threshold " + std::to_string(deltas_[i])
                                                       : "thresholds must be strictly ascending");
      }
    }
  }

  [[nodiscard]] std::span<const double> deltas() const noexcept { return deltas_; }
  [[nodiscard]] std::size_t size() const noexcept { return deltas_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return deltas_.at(i); }

 private:
  std::vector<double> deltas_;
};

struct GridRun {
  double delta = 0.0;
  std::vector<IntrinsicEvent> events;
};

struct ThresholdSummary {
  double delta = 0.0;
  std::uint64_t n_dc = 0;
  std::uint64_t n_os = 0;
  double coastline = 0.0;  // fractional units: (n_dc + n_os) * delta
  std::vector<double> overshoot_lengths;
  std::optional<Nanos> first_event_ts;
  std::optional<Nanos> last_event_ts;
};

/// Worker count for grid runs: INTRINSIC_TIME_THREADS if set to a positive
/// integer, otherwise the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("INTRINSIC_TIME_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<unsigned>(v);
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace detail {

// Evaluates job(i) for i in [0, n) on up to `threads` workers. Results must be
// written to pre-sized per-index slots; the first exception in index order is
// rethrown.
template <class Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), n);
  std::vector<std::exception_ptr> errors(n);
  auto run_slice = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run_slice(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(run_slice, w);
    }
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace detail

inline std::vector<GridRun> run_grid(std::span<const Tick> ticks, const ThresholdGrid& grid,
                                     MoveConvention convention, Mode initial_mode = Mode::Up,
                                     unsigned threads = default_thread_count()) {
  std::vector<GridRun> runs(grid.size());
  detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
    runs[i].delta = grid[i];
    runs[i].events = process(ticks, ThresholdConfig{grid[i], convention}, initial_mode);
  });
  return runs;
}

inline ThresholdSummary summarize(double delta, std::span<const IntrinsicEvent> events) {
  ThresholdSummary s;
  s.delta = delta;
  for (const IntrinsicEvent& e : events) {
    if (e.delta != delta) {
      throw ConsistencyError("event with delta " + std::to_string(e.delta) + " in summary for delta " +
                             std::to_string(delta));
    }
    if (e.kind == EventKind::DirectionalChange) {
      ++s.n_dc;
    } else {
      ++s.n_os;
    }
  }
  s.coastline = static_cast<double>(s.n_dc + s.n_os) * delta;
  if (!events.empty()) {
    s.first_event_ts = events.front().timestamp_ns;
    s.last_event_ts = events.back().timestamp_ns;
  }
  return s;
}

/// Summary including the overshoot length of every completed segment.
inline ThresholdSummary summarize(double delta, std::span<const IntrinsicEvent> events, std::span<const Tick> ticks,
                                  MoveConvention convention) {
  ThresholdSummary s = summarize(delta, events);
  s.overshoot_lengths = overshoot_lengths(events, ticks, ThresholdConfig{delta, convention});
  return s;
}

/// Counts-only grid pass: no event is materialized, so memory per runner is
/// constant regardless of stream length. overshoot_lengths stays empty.
inline std::vector<ThresholdSummary> run_grid_counts(std::span<const Tick> ticks, const ThresholdGrid& grid,
                                                     MoveConvention convention, Mode initial_mode = Mode::Up,
                                                     unsigned threads = default_thread_count()) {
  std::vector<ThresholdSummary> out(grid.size());
  detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
    ThresholdSummary& s = out[i];
    s.delta = grid[i];
    process(ticks, ThresholdConfig{grid[i], convention}, initial_mode, [&s](const IntrinsicEvent& e) {
      if (e.kind == EventKind::DirectionalChange) {
        ++s.n_dc;
      } else {
        ++s.n_os;
      }
      if (!s.first_event_ts) {
        s.first_event_ts = e.timestamp_ns;
      }
      s.last_event_ts = e.timestamp_ns;
    });
    s.coastline = static_cast<double>(s.n_dc + s.n_os) * s.delta;
  });
  return out;
}

}  // namespace itime
