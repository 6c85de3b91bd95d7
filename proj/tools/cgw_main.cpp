#include <iostream>

#include "cgw/cli.hpp"

int main(int argc, char** argv) {
  return cgw::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
