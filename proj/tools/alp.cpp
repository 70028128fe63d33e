#include <iostream>

#include "alp/cli.hpp"

int main(int argc, char** argv) {
  return alp::cli::run(argc, argv, std::cout, std::cerr);
}
