#include <iostream>
#include <string>
#include <vector>

#include "htype/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return htype::cli::run(args, std::cout, std::cerr);
}
