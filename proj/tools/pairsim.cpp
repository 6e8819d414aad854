#include <iostream>
#include <string>
#include <vector>

#include "pairsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pairsim::cli::run(args, std::cout, std::cerr);
}
