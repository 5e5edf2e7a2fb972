#include <iostream>

#include "slowvary/cli/cli.hpp"

int main(int argc, char** argv) {
  return slowvary::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
