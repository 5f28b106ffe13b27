#include <iostream>
#include <string>
#include <vector>

#include "drivesim/cli/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return drivesim::cli::run(args, std::cout, std::cerr);
}
