#include <iostream>
#include <string>
#include <vector>

#include "ahmes/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ahmes::run_cli(args, std::cout, std::cerr);
}
