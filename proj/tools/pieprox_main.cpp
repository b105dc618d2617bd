#include <iostream>

#include "pie/cli.hpp"

int main(int argc, char** argv) {
  return pie::run_cli(argc, argv, std::cout, std::cerr);
}
