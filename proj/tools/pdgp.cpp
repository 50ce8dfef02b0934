#include <iostream>

#include "pdgp/cli.hpp"

int main(int argc, char** argv) {
  return pdgp::cli::run(argc, argv, std::cout, std::cerr);
}
