// Reads `timestamp_ns,price` lines from stdin and prints DC/OS events for one
// threshold as they happen.
//
//   ./itime_stream_events 0.005 < ticks.csv

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "itime/dc_engine.hpp"
#include "itime/io.hpp"

int main(int argc, char** argv) {
  const double delta = argc > 1 ? std::strtod(argv[1], nullptr) : 0.005;
  const itime::ThresholdConfig config{delta, itime::MoveConvention::Relative};

  std::optional<itime::DcRunner> runner;
  std::string line;
  const auto print = [](const itime::IntrinsicEvent& e) {
    std::cout << itime::to_string(e.kind) << ' ' << itime::to_string(e.direction) << " t=" << e.timestamp_ns
              << " p=" << itime::format_double(e.price) << " clock=" << e.clock_index << '\n';
  };
  try {
    while (std::getline(std::cin, line)) {
      if (line.empty() || line.front() == '#') {
        continue;
      }
      const auto comma = line.find(',');
      itime::Tick tick;
      if (comma == std::string::npos || !itime::detail::parse_number(std::string_view(line).substr(0, comma), tick.timestamp_ns) ||
          !itime::detail::parse_number(std::string_view(line).substr(comma + 1), tick.price)) {
        continue;  // header or junk
      }
      if (!runner) {
        runner.emplace(config, tick, itime::Mode::Up);
        continue;
      }
      runner->step(tick, print);
    }
  } catch (const itime::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
