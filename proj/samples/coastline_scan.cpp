// Coastline length and DC count across a decade of thresholds on a seeded
// random walk, using the counts-only grid pass.

#include <iostream>
#include <vector>

#include "itime/io.hpp"
#include "itime/multiscale.hpp"
#include "itime/synthetic.hpp"

int main() {
  const auto ticks = itime::generate_random_walk(100.0, 2e-4, 1'000'000, 7);
  const itime::ThresholdGrid grid({0.001, 0.002, 0.003, 0.005, 0.007, 0.01});
  const auto rows = itime::run_grid_counts(ticks, grid, itime::MoveConvention::LogReturn);
  itime::write_summary(rows, std::cout);
  return 0;
}
