#include <iostream>

#include "idemlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return idemlab::cli::run_cli(args, std::cout, std::cerr);
}
