#include <iostream>
#include <string>
#include <vector>

#include "icprobe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return icprobe::cli::Run(args, std::cout, std::cerr);
}
