#include <iostream>
#include <string>
#include <vector>

#include "potts/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return potts::cli::run(args, std::cout, std::cerr);
}
