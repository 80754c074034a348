#include <iostream>
#include <string>
#include <vector>

#include "dafd/cli.hpp"

int main(int argc, char** argv) {
  return dafd::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
