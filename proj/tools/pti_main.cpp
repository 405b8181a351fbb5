#include <iostream>
#include <string>
#include <vector>

#include "pti/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pti::cli::run(std::move(args), std::cout, std::cerr);
}
