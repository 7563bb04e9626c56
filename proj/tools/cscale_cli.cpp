#include <iostream>
#include <string>
#include <vector>

#include "cscale/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cscale::run(args, std::cout, std::cerr);
}
