#include <iostream>
#include <string>
#include <vector>

#include "swhid/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv, argv + argc);
  int status = swhid::cli::run(args, std::cout, std::cerr);
  std::cout.flush();
  return status;
}
