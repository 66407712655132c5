//===- PatternChecker.h - Signature-level violation patterns ---------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_PATTERNCHECKER_H
#define LIFECHECK_PATTERNCHECKER_H

#include "lifecheck/Extractor.h"

#include <string>
#include <vector>

namespace lifecheck {

/// Declaration order is the report order.
enum class ViolationKind { UafArgReturn, UafArgArg, NemArgReturn };

/// `uaf-arg-return`, `uaf-arg-arg`, `nem-arg-return`.
const char *kindName(ViolationKind K);
std::optional<ViolationKind> parseKindName(const std::string &Name);

/// Which shape of the non-exclusive-mutability match produced a candidate.
enum class NemForm {
  None,
  /// Source is `*mut T`/`&mut T`, target is a T.
  SourcePointer,
  /// Target is `*mut T`/`&mut T`, source is a T.
  TargetPointer,
  /// Both are T reached directly through mutable pointers.
  Pointee,
};

struct CandidateViolation {
  ViolationKind Kind;
  ExtractionFact Source;
  ExtractionFact Target;
  NemForm Form = NemForm::None;
  std::string Function;
  SourceSpan Span;
};

struct CheckerOptions {
  unsigned MaxDepth = DefaultMaxDepth;
  std::size_t MaxCandidates = 256;
};

std::vector<CandidateViolation>
checkArgReturnUaf(const std::vector<ExtractionFact> &ArgFacts,
                  const std::vector<ExtractionFact> &RetFacts,
                  const OutlivesSet &Bounds);

std::vector<CandidateViolation>
checkArgArgUaf(const std::vector<std::vector<ExtractionFact>> &ArgFactsByArg,
               const OutlivesSet &Bounds);

std::vector<CandidateViolation>
checkArgReturnNem(const std::vector<ExtractionFact> &ArgFacts,
                  const std::vector<ExtractionFact> &RetFacts,
                  const OutlivesSet &Bounds);

struct CheckResult {
  std::vector<CandidateViolation> Candidates;
  /// Set when the candidate list was truncated.
  std::string Diagnostic;
};

/// Runs all three checks on one function. The result is deduplicated and
/// ordered by kind, then printed source and target paths. Past
/// MaxCandidates, the pairs with the shortest combined paths are kept.
CheckResult checkFunction(const FunctionModel &Fn, const StructTable &Structs,
                          const CheckerOptions &Opts = {});

} // namespace lifecheck

#endif // LIFECHECK_PATTERNCHECKER_H
