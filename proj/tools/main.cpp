#include <iostream>

#include "qkdfinite/cli/commands.hpp"

int main(int argc, char** argv) {
  return qkdfinite::cli::run(argc, argv, std::cout, std::cerr);
}
