#include <iostream>
#include <string>
#include <vector>

#include "maiv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return maiv::cli::run(args, std::cout, std::cerr);
}
