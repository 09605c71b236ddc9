#include <iostream>
#include <string>
#include <vector>

#include "sqrt2lab/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return sqrt2lab::cli::run(args, std::cout, std::cerr);
}
