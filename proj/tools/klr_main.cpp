#include <iostream>

#include "klr/cli.hpp"

int main(int argc, char** argv) {
  return klr::cli::run(argc, argv, std::cout, std::cerr);
}
