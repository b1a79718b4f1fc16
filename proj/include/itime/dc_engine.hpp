#pragma once

// Directional-change / overshoot state machine for a single threshold.
//
// A runner tracks the extremum of the current trend. A reversal of at least
// delta from that extremum registers a directional change (DC) and flips the
// mode. After the first DC, every further delta step in the trend direction,
// counted multiplicatively from the DC price, registers an overshoot (OS).
// Each DC or OS is one tick of intrinsic time.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "itime/core.hpp"

namespace itime {

enum class EventKind : std::uint8_t { DirectionalChange, Overshoot };

constexpr std::string_view to_string(EventKind k) noexcept {
  return k == EventKind::DirectionalChange ? "DC" : "OS";
}

struct IntrinsicEvent {
  EventKind kind = EventKind::DirectionalChange;
  Mode direction = Mode::Up;  // trend direction after the event
  Nanos timestamp_ns = 0;
  double price = 0.0;
  double delta = 0.0;
  std::uint64_t clock_index = 0;

  friend bool operator==(const IntrinsicEvent&, const IntrinsicEvent&) = default;
};

struct RunnerState {
  Mode mode = Mode::Up;
  double extremum_price = 0.0;
  double os_reference_price = 0.0;
  std::uint64_t dc_count_since_init = 0;
  std::uint64_t intrinsic_clock = 0;
  std::optional<double> dc_confirm_price;
  Nanos last_timestamp_ns = 0;

  friend bool operator==(const RunnerState&, const RunnerState&) = default;
};

class DcRunner {
 public:
  DcRunner(const ThresholdConfig& config, const Tick& initial_tick, Mode initial_mode)
      : DcRunner(config, initial_state(config, initial_tick, initial_mode)) {}

  /// Resumes a runner from a previously captured state.
  DcRunner(const ThresholdConfig& config, const RunnerState& state) : config_(config), state_(state) {
    config_.validate();
    if (!(state_.extremum_price > 0.0) || !(state_.os_reference_price > 0.0)) {
      throw DomainError("runner state prices must be strictly positive");
    }
    trigger_ = trigger_level(config_.delta);
    if (config_.move_convention == MoveConvention::LogReturn) {
      up_step_ = std::exp(config_.delta);
      down_step_ = std::exp(-config_.delta);
    } else {
      up_step_ = 1.0 + config_.delta;
      down_step_ = 1.0 - config_.delta;
    }
  }

  [[nodiscard]] const RunnerState& state() const noexcept { return state_; }
  [[nodiscard]] const ThresholdConfig& config() const noexcept { return config_; }

  /// Feeds one tick; `sink(const IntrinsicEvent&)` receives every emitted event
  /// in clock order. Emits at most one DC, possibly several OS on a gap tick.
  template <class Sink>
  void step(const Tick& tick, Sink&& sink) {
    if (!(tick.price > 0.0)) {
      throw DomainError("tick price must be strictly positive, got " + std::to_string(tick.price));
    }
    if (tick.timestamp_ns < state_.last_timestamp_ns) {
      throw OrderingError("tick timestamp " + std::to_string(tick.timestamp_ns) + " precedes " +
                          std::to_string(state_.last_timestamp_ns));
    }
    state_.last_timestamp_ns = tick.timestamp_ns;

    const double price = tick.price;
    const MoveConvention conv = config_.move_convention;
    if (state_.mode == Mode::Up) {
      if (price > state_.extremum_price) {
        state_.extremum_price = price;
        if (state_.dc_confirm_price) {
          while (relative_move(state_.os_reference_price, price, conv) >= trigger_) {
            state_.os_reference_price *= up_step_;
            emit(EventKind::Overshoot, tick, sink);
          }
        }
      } else if (relative_move(state_.extremum_price, price, conv) <= -trigger_) {
        confirm_dc(Mode::Down, tick, sink);
      }
    } else {
      if (price < state_.extremum_price) {
        state_.extremum_price = price;
        if (state_.dc_confirm_price) {
          while (relative_move(state_.os_reference_price, price, conv) <= -trigger_) {
            state_.os_reference_price *= down_step_;
            emit(EventKind::Overshoot, tick, sink);
          }
        }
      } else if (relative_move(state_.extremum_price, price, conv) >= trigger_) {
        confirm_dc(Mode::Up, tick, sink);
      }
    }
  }

  void step(const Tick& tick, std::vector<IntrinsicEvent>& out) {
    step(tick, [&out](const IntrinsicEvent& e) { out.push_back(e); });
  }

 private:
  static RunnerState initial_state(const ThresholdConfig& config, const Tick& tick, Mode mode) {
    config.validate();
    if (!(tick.price > 0.0)) {
      throw DomainError("initial tick price must be strictly positive");
    }
    RunnerState s;
    s.mode = mode;
    s.extremum_price = tick.price;
    s.os_reference_price = tick.price;
    s.last_timestamp_ns = tick.timestamp_ns;
    return s;
  }

  template <class Sink>
  void confirm_dc(Mode new_mode, const Tick& tick, Sink& sink) {
    state_.mode = new_mode;
    state_.extremum_price = tick.price;
    state_.os_reference_price = tick.price;
    state_.dc_confirm_price = tick.price;
    ++state_.dc_count_since_init;
    emit(EventKind::DirectionalChange, tick, sink);
  }

  template <class Sink>
  void emit(EventKind kind, const Tick& tick, Sink& sink) {
    sink(IntrinsicEvent{kind, state_.mode, tick.timestamp_ns, tick.price, config_.delta, state_.intrinsic_clock});
    ++state_.intrinsic_clock;
  }

  ThresholdConfig config_;
  RunnerState state_;
  double trigger_ = 0.0;
  double up_step_ = 1.0;
  double down_step_ = 1.0;
};

inline RunnerState new_runner(const ThresholdConfig& config, const Tick& initial_tick, Mode initial_mode) {
  return DcRunner(config, initial_tick, initial_mode).state();
}

struct StepResult {
  RunnerState state;
  std::vector<IntrinsicEvent> events;
};

/// Value-semantics wrapper around DcRunner::step.
inline StepResult step(const RunnerState& state, const Tick& tick, const ThresholdConfig& config) {
  DcRunner runner(config, state);
  StepResult result;
  runner.step(tick, result.events);
  result.state = runner.state();
  return result;
}

/// Streams `ticks` through a fresh runner seeded with the first tick.
template <class Sink>
void process(std::span<const Tick> ticks, const ThresholdConfig& config, Mode initial_mode, Sink&& sink) {
  if (ticks.empty()) {
    throw EmptyInputError("tick sequence is empty");
  }
  DcRunner runner(config, ticks.front(), initial_mode);
  for (const Tick& t : ticks.subspan(1)) {
    runner.step(t, sink);
  }
}

inline std::vector<IntrinsicEvent> process(std::span<const Tick> ticks, const ThresholdConfig& config,
                                           Mode initial_mode = Mode::Up) {
  std::vector<IntrinsicEvent> events;
  process(ticks, config, initial_mode, [&events](const IntrinsicEvent& e) { events.push_back(e); });
  return events;
}

/// Overshoot length of every completed trend segment: the absolute move from
/// the DC confirmation price to the most extreme price reached in the trend
/// direction before the next DC. The trailing unfinished segment is dropped.
inline std::vector<double> overshoot_lengths(std::span<const IntrinsicEvent> events, std::span<const Tick> ticks,
                                             const ThresholdConfig& config) {
  std::vector<double> lengths;
  std::size_t cursor = 0;
  std::optional<std::size_t> segment_start;
  Mode segment_mode = Mode::Up;

  // DC events are emitted in tick order, so each can be located by scanning
  // forward for its triggering tick.
  auto locate = [&](const IntrinsicEvent& e) -> std::size_t {
    for (std::size_t i = cursor; i < ticks.size(); ++i) {
      if (ticks[i].timestamp_ns == e.timestamp_ns && ticks[i].price == e.price) {
        return i;
      }
    }
    throw ConsistencyError("DC event at t=" + std::to_string(e.timestamp_ns) + " has no matching tick");
  };

  for (const IntrinsicEvent& e : events) {
    if (e.kind != EventKind::DirectionalChange) {
      continue;
    }
    const std::size_t idx = locate(e);
    if (segment_start) {
      const auto first = ticks.begin() + static_cast<std::ptrdiff_t>(*segment_start);
      const auto last = ticks.begin() + static_cast<std::ptrdiff_t>(idx);
      const auto cmp = [](const Tick& a, const Tick& b) { return a.price < b.price; };
      const double dc_price = ticks[*segment_start].price;
      const double extreme = segment_mode == Mode::Up ? std::max_element(first, last, cmp)->price
                                                      : std::min_element(first, last, cmp)->price;
      lengths.push_back(std::abs(relative_move(dc_price, extreme, config.move_convention)));
    }
    segment_start = idx;
    segment_mode = e.direction;
    cursor = idx + 1;
  }
  return lengths;
}

}  // namespace itime
