#include <iostream>
#include <string>
#include <vector>

#include "vischase/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vischase::cli::dispatch(args, std::cout, std::cerr);
}
