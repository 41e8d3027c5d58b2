#include <iostream>
#include <string>
#include <vector>

#include "maxent/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return maxent::cli_main(args, std::cout, std::cerr);
}
