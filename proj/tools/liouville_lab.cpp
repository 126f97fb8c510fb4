#include <iostream>
#include <string>
#include <vector>

#include "liouville/cli.hpp"

int main(int argc, char** argv) {
  return liouville::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
