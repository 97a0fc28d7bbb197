#include <iostream>
#include <string>
#include <vector>

#include "plc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return plc::run_cli(args, std::cout, std::cerr);
}
