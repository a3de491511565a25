// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "condtrap/cli.hpp"

int main(int argc, char** argv) {
  return condtrap::run_cli(argc, argv, std::cout, std::cerr);
}
