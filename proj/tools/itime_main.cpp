#include <string>
#include <vector>

#include "itime/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return itime::cli::run_cli(args);
}
