#include <iostream>
#include <string>
#include <vector>

#include "cfc/cli.hpp"

int main(int argc, char** argv) {
  return cfc::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
