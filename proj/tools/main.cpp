// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sdq::cli::run(args, std::cout, std::cerr);
}
