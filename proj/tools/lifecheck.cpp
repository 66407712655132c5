//===- lifecheck.cpp - Command-line entry point ------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Cli.h"

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> Args(argv + 1, argv + argc);
  return lifecheck::runCli(Args, std::cout, std::cerr);
}
