//===- Cli.h - Command-line driver ------------------------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_CLI_H
#define LIFECHECK_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace lifecheck {

/// Exit codes: 0 clean, 1 findings (or a known-miss regression for `eval`),
/// 2 usage, input or parse error.
int runCli(const std::vector<std::string> &Args, std::ostream &Out,
           std::ostream &Err);

} // namespace lifecheck

#endif // LIFECHECK_CLI_H
