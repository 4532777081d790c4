#include <iostream>

#include "qbattery/cli.hpp"
#include "qbattery/platform.hpp"

int main(int argc, char** argv) {
  qbattery::ensure_working_blas(argv);
  return qbattery::run_cli(argc, argv, std::cout, std::cerr);
}
