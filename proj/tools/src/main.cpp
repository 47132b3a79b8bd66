#include <iostream>
#include <string>
#include <vector>

#include "sntk_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sntk::cli::run(args, std::cout, std::cerr);
}
