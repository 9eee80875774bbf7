#include <iostream>
#include <string>
#include <vector>

#include "hetsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hetsim::cli::run_cli(args, std::cout, std::cerr);
}
