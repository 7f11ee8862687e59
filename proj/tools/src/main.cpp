#include <iostream>

#include "qmine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qmine::run_cli(args, std::cin, std::cout, std::cerr);
}
