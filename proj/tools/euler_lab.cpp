#include <iostream>
#include <string>
#include <vector>

#include "eulerlab/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return eulerlab::cli::run(args, std::cout, std::cerr);
}
