#include <iostream>
#include <string>
#include <vector>

#include "supmart/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return supmart::run_cli(std::move(args), std::cout, std::cerr);
}
