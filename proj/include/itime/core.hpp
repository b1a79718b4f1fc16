#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace itime {

/// Nanoseconds since epoch.
using Nanos = std::int64_t;

inline constexpr Nanos kNanosPerSecond = 1'000'000'000;

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map families of failures to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IngestionError : public Error {
 public:
  using Error::Error;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

struct Tick {
  Nanos timestamp_ns = 0;
  double price = 0.0;

  friend bool operator==(const Tick&, const Tick&) = default;
};

enum class Mode : std::uint8_t { Up, Down };

constexpr Mode opposite(Mode m) noexcept { return m == Mode::Up ? Mode::Down : Mode::Up; }

constexpr std::string_view to_string(Mode m) noexcept { return m == Mode::Up ? "up" : "down"; }

/// How a price move between two prices is measured.
enum class MoveConvention : std::uint8_t {
  Relative,  ///< (to - from) / from
  LogReturn  ///< ln(to / from)
};

constexpr std::string_view to_string(MoveConvention c) noexcept {
  return c == MoveConvention::Relative ? "relative" : "log";
}

struct ThresholdConfig {
  double delta = 0.01;
  MoveConvention move_convention = MoveConvention::Relative;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw ConfigError("threshold delta must lie in (0, 1), got " + std::to_string(delta));
    }
  }
};

/// Signed fractional move from `from_price` to `to_price`.
inline double relative_move(double from_price, double to_price, MoveConvention convention) {
  if (!(from_price > 0.0) || !(to_price > 0.0)) {
    throw DomainError("prices must be strictly positive");
  }
  if (convention == MoveConvention::LogReturn) {
    return std::log(to_price / from_price);
  }
  return (to_price - from_price) / from_price;
}

// Threshold comparisons are inclusive. A move that is exactly delta in exact
// arithmetic can land a few ulps short in binary floating point (99 -> 98.01
// evaluates to -0.00999999999999995), so the trigger level is delta shrunk by
// this relative amount.
inline constexpr double kThresholdRelTolerance = 1e-9;

constexpr double trigger_level(double delta) noexcept {
  return delta * (1.0 - kThresholdRelTolerance);
}

}  // namespace itime
