//===- Pipeline.h - The four-step analysis over files -----------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_PIPELINE_H
#define LIFECHECK_PIPELINE_H

#include "lifecheck/Report.h"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lifecheck {

struct PipelineOptions {
  bool NoAlias = false;
  bool UnknownFields = false;
  bool NoFilter = false;
  /// Drop candidates whose function has no lowered body instead of keeping
  /// them at low confidence.
  bool DropPatternOnly = false;
  unsigned MaxDepth = DefaultMaxDepth;
  std::vector<FilterRule> Rules = defaultFilterRules();
};

struct FileResult {
  std::string File;
  std::vector<Finding> Findings;
  std::vector<std::string> Diagnostics;
};

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

FileResult analyzeCrate(const CrateModel &Crate, const std::string &File,
                        const PipelineOptions &Opts);

/// Throws ParseError on a syntax error outside function bodies.
FileResult analyzeSource(std::string_view Source, const std::string &File,
                         const PipelineOptions &Opts);

/// Throws InputError if the file cannot be read.
FileResult analyzeFile(const std::string &Path, const PipelineOptions &Opts);

/// Files named by \p Paths, with directories expanded to the `.rs` files
/// below them. Sorted and deduplicated.
std::vector<std::string> collectSources(const std::vector<std::string> &Paths);

/// Analyzes every collected file concurrently. Results are ordered by path.
std::vector<FileResult> analyzePaths(const std::vector<std::string> &Paths,
                                     const PipelineOptions &Opts);

std::vector<Finding> allFindings(const std::vector<FileResult> &Results);

} // namespace lifecheck

#endif // LIFECHECK_PIPELINE_H
