//===- AliasAnalysis.h - Intra-procedural points-to confirmation ------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A field-sensitive, flow-sensitive, single-pass points-to analysis. Each
// memory cell is a Key: a base (a path root or an abstract location) plus a
// field path. The environment maps each Key to the set of cells it may point
// to. Sets only grow.
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_ALIASANALYSIS_H
#define LIFECHECK_ALIASANALYSIS_H

#include "lifecheck/PatternChecker.h"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lifecheck {

/// Raised when a candidate's function has no lowered body.
class BodyUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct AbstractLoc {
  enum class Origin { SeededSource, FreshFromDeref, ArgRoot };
  unsigned Id = 0;
  Origin From = Origin::FreshFromDeref;
  /// Statement index for FreshFromDeref; -1 for allocations made while
  /// seeding, before the first statement.
  int Stmt = -1;
  /// Argument index for ArgRoot.
  unsigned Arg = 0;
};

struct Key {
  std::variant<PathRoot, unsigned> Base;
  std::vector<std::string> Fields;

  bool isLoc() const { return std::holds_alternative<unsigned>(Base); }
  std::string str() const;

  auto operator<=>(const Key &) const = default;
  bool operator==(const Key &) const = default;
};

struct AliasOptions {
  /// Field paths in keys are cut at this length.
  unsigned MaxDepth = DefaultMaxDepth;
  /// Let calls link fields of their arguments that the environment has not
  /// seen yet (disables the unknown-field exclusion).
  bool UnknownFields = false;
};

class PointsToState {
public:
  explicit PointsToState(AliasOptions Opts = {}) : Opts(Opts) {}

  /// Cells denoted by \p P. With \p Alloc, dereferencing a cell whose set is
  /// empty allocates a fresh location for it; without, it yields nothing.
  std::set<Key> resolve(const Place &P, bool Alloc, int Stmt);

  /// Points-to set of \p K (after unknown-field fallback, if enabled).
  std::set<Key> pointsTo(const Key &K) const;

  /// Allocates a location and returns its key.
  Key alloc(AbstractLoc::Origin From, int Stmt, unsigned Arg = 0);

  void transfer(const Statement &S, int Stmt);

  const std::map<Key, std::set<Key>> &env() const { return Env; }
  const std::vector<AbstractLoc> &locations() const { return Locs; }
  /// Adds \p Cells to the set of every key in \p Into.
  void addAll(const std::set<Key> &Into, const std::set<Key> &Cells);

private:
  Key child(const Key &K, std::string Field) const;
  /// Existing keys strictly below \p K, with their suffix.
  std::vector<std::pair<Key, std::vector<std::string>>>
  subkeys(const Key &K) const;
  std::set<Key> reach(const std::set<Key> &Cells) const;
  void copyInto(const std::set<Key> &Dst, const std::set<Key> &Src);

  AliasOptions Opts;
  std::map<Key, std::set<Key>> Env;
  std::set<Key> Linked;
  std::vector<AbstractLoc> Locs;
};

/// True if the value seeded at \p Source may be found at \p Target after one
/// reverse-postorder pass over \p B.
bool mayFlow(const Body &B, const ValuePath &Source, const ValuePath &Target,
             const AliasOptions &Opts = {});

/// Runs the flow query that matches the candidate's shape. Throws
/// BodyUnavailable if \p Fn has no body.
bool confirmCandidate(const FunctionModel &Fn, const CandidateViolation &C,
                      const AliasOptions &Opts = {});

} // namespace lifecheck

#endif // LIFECHECK_ALIASANALYSIS_H
