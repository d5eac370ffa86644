// SPDX-License-Identifier: Apache-2.0
#include "indc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return indc::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
