//===- Report.h - Findings, shallow filter and report emission -------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_REPORT_H
#define LIFECHECK_REPORT_H

#include "lifecheck/PatternChecker.h"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lifecheck {

enum class Stage { Candidate, AliasConfirmed, PatternOnly, Filtered };
enum class Confidence { High, Low };

const char *stageName(Stage S);
const char *confidenceName(Confidence C);

struct Finding {
  explicit Finding(CandidateViolation V) : Violation(std::move(V)) {}

  CandidateViolation Violation;
  Stage St = Stage::Candidate;
  Confidence Conf = Confidence::Low;
  /// Name of the filter rule that suppressed the finding.
  std::optional<std::string> SuppressedBy;
  /// Unqualified function name and impl context, for filter matching.
  std::string FnName;
  std::optional<std::string> ImplStruct;
  std::optional<std::string> ImplTrait;
};

struct FilterRule {
  std::string Name;
  std::string FunctionPattern;
  /// Matched against the impl's trait name or, failing that, its struct.
  std::optional<std::string> ImplPattern;
};

/// Whole-string match where `*` matches any run of characters.
bool globMatch(const std::string &Pattern, const std::string &Text);

/// The iterator `next`/`next_back` rules.
std::vector<FilterRule> defaultFilterRules();

class FilterFileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reads `{"version": 1, "rules": [{name, function, impl?}]}`.
std::vector<FilterRule> loadFilterRules(const std::string &Path);

/// Rules from $LIFECHECK_FILTERS, else the shipped data file, else the
/// built-in defaults when neither file exists.
std::vector<FilterRule> loadConfiguredFilterRules();

/// Marks findings in matching functions as filtered; order is preserved.
std::vector<Finding> applyShallowFilter(std::vector<Finding> Findings,
                                        const std::vector<FilterRule> &Rules);

/// One row of a report, in the form it is serialized.
struct ReportEntry {
  std::string File;
  unsigned Line = 0;
  std::string Function;
  std::string Kind;
  std::string Source;
  std::string Target;
  std::string Confidence;
  std::string Stage;

  auto operator<=>(const ReportEntry &) const = default;
  bool operator==(const ReportEntry &) const = default;
};

ReportEntry toEntry(const Finding &F);

/// Sorted entries; filtered findings only when \p Verbose.
std::vector<ReportEntry> reportEntries(const std::vector<Finding> &Findings,
                                       bool Verbose = false);

enum class ReportFormat { Text, Json };

std::string emitReport(const std::vector<Finding> &Findings, ReportFormat Format,
                       bool Verbose = false);

/// Inverse of the JSON format. Throws std::runtime_error on bad input.
std::vector<ReportEntry> parseJsonReport(const std::string &Json);

} // namespace lifecheck

#endif // LIFECHECK_REPORT_H
