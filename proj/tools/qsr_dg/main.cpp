#include <iostream>
#include <string>
#include <vector>

#include "bench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qsr_dg::run(args, std::cout, std::cerr);
}
