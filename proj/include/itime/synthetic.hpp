#pragma once

// Seeded synthetic price paths.
//
// Streams are reproducible across platforms: uniforms come from std::mt19937_64
// (whose output sequence is fixed by the standard) as the top 53 bits scaled
// to [0, 1), and normals from the basic Box-Muller transform, consuming two
// uniforms per pair and returning the cosine branch first.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "itime/core.hpp"

namespace itime {

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

struct GbmParams {
  double s0 = 100.0;
  double mu = 0.0;        // drift per unit time
  double sigma = 0.0;     // volatility per sqrt unit time
  double dt_step = 1.0;   // seconds
  std::uint64_t n_steps = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
      throw ConfigError("gbm: s0 must be positive");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
      throw ConfigError("gbm: sigma must be non-negative and mu finite");
    }
    if (!(dt_step > 0.0) || !std::isfinite(dt_step)) {
      throw ConfigError("gbm: dt_step must be positive");
    }
    if (n_steps < 1) {
      throw ConfigError("gbm: n_steps must be at least 1");
    }
    if (static_cast<double>(n_steps) * dt_step * 1e9 > 9.0e18) {
      throw ConfigError("gbm: timestamps overflow 64-bit nanoseconds");
    }
  }
};

inline Nanos step_timestamp(std::uint64_t k, double dt_seconds) {
  return static_cast<Nanos>(std::llround(static_cast<double>(k) * dt_seconds * 1e9));
}

/// S[k+1] = S[k] * exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z[k]); n_steps + 1 ticks.
inline std::vector<Tick> generate_gbm(const GbmParams& p) {
  p.validate();
  NormalSource rng(p.seed);
  const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * p.dt_step;
  const double vol = p.sigma * std::sqrt(p.dt_step);

  std::vector<Tick> ticks;
  ticks.reserve(p.n_steps + 1);
  ticks.push_back({0, p.s0});
  double log_price = std::log(p.s0);
  for (std::uint64_t k = 1; k <= p.n_steps; ++k) {
    double price = 0.0;
    if (vol == 0.0) {
      // Closed form, so a flat or pure-drift path carries no accumulated rounding.
      price = drift == 0.0 ? p.s0 : p.s0 * std::exp(drift * static_cast<double>(k));
    } else {
      log_price += drift + vol * rng.normal();
      price = std::exp(log_price);
    }
    ticks.push_back({step_timestamp(k, p.dt_step), price});
  }
  return ticks;
}

/// Log-price walk on the lattice ln(s0) + j * step_size, one +-step per tick
/// with probability 1/2 each, ticks `dt_seconds` apart. Prices are evaluated
/// from the integer lattice index so revisiting a level reproduces the same
/// double exactly.
inline std::vector<Tick> generate_random_walk(double s0, double step_size, std::uint64_t n_steps,
                                              std::uint64_t seed, double dt_seconds = 1.0) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw ConfigError("walk: s0 must be positive");
  }
  if (!(step_size > 0.0 && step_size < 1.0)) {
    throw ConfigError("walk: step size must lie in (0, 1)");
  }
  if (n_steps < 1) {
    throw ConfigError("walk: n_steps must be at least 1");
  }
  if (!(dt_seconds > 0.0) || static_cast<double>(n_steps) * dt_seconds * 1e9 > 9.0e18) {
    throw ConfigError("walk: dt must be positive and timestamps must fit 64-bit nanoseconds");
  }
  NormalSource rng(seed);
  std::vector<Tick> ticks;
  ticks.reserve(n_steps + 1);
  ticks.push_back({0, s0});
  std::int64_t level = 0;
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    level += (rng.bits() >> 63) != 0 ? 1 : -1;
    ticks.push_back({step_timestamp(k, dt_seconds), s0 * std::exp(static_cast<double>(level) * step_size)});
  }
  return ticks;
}

}  // namespace itime
