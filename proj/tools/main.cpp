#include <iostream>
#include <string>
#include <vector>

#include "msbn/workbench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return msbn::run_cli(args, std::cout, std::cerr);
}
