#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return vm3b::harness::run_cli(argc, argv, std::cout, std::cerr);
}
