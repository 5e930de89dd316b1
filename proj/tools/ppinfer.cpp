#include <iostream>

#include "ppinfer/cli.hpp"

int main(int argc, char** argv) {
  return ppinfer::cli_main(argc, argv, std::cin, std::cout, std::cerr);
}
