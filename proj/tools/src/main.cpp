#include <iostream>

#include "egomwf_cli/cli.hpp"

int main(int argc, char** argv) {
  egomwf::cli::Args args(argv + 1, argv + argc);
  return egomwf::cli::run(args, std::cout, std::cerr);
}
