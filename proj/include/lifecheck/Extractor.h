//===- Extractor.h - Lifetime facts and outlives bounds --------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Decomposes argument and return types into the values they contain, each
// paired with the lifetime it must outlive, and derives the outlives
// relation implied by the argument types.
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_EXTRACTOR_H
#define LIFECHECK_EXTRACTOR_H

#include "lifecheck/Model.h"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lifecheck {

struct ExtractionFact {
  ValuePath Path;
  SubjectType Type;
  /// nullopt means Owned: no reference governs the value.
  std::optional<Lifetime> BorrowedFor;
  /// Some deref along Path goes through a raw pointer.
  bool ViaRaw = false;
  /// Pointer kinds dereferenced along Path, outermost first.
  std::vector<SubjectType::Kind> DerefChain;

  /// Reached through at least one deref, and only through shared ones.
  bool behindImmutableOnly() const;
  /// The last projection other than Index derefs a `&mut` or `*mut`.
  bool directMutPointee() const;
  /// The innermost deref on the path is mutable.
  bool behindMutable() const;

  /// `(*arg2).y: String : 'b` style rendering for diagnostics.
  std::string str() const;
};

constexpr unsigned DefaultMaxDepth = 8;

/// All facts reachable from \p Root of type \p Type, including the root
/// itself, with paths at most \p MaxDepth projections long.
std::vector<ExtractionFact> decompose(const PathRoot &Root,
                                      const SubjectType &Type,
                                      const StructTable &Structs,
                                      unsigned MaxDepth = DefaultMaxDepth);

/// A transitively closed "longer outlives shorter" relation.
class OutlivesSet {
public:
  OutlivesSet() = default;
  explicit OutlivesSet(const std::vector<std::pair<Lifetime, Lifetime>> &Bounds);

  void add(const Lifetime &Longer, const Lifetime &Shorter);
  /// Reflexive, 'static outlives everything, otherwise the closure.
  bool outlives(const Lifetime &L1, const Lifetime &L2) const;
  /// Stored pairs (closed, without reflexive or 'static axioms).
  const std::set<std::pair<Lifetime, Lifetime>> &pairs() const { return Pairs; }

private:
  std::set<std::pair<Lifetime, Lifetime>> Pairs;
};

/// Bounds implied by the facts of all arguments (an inner borrow outlives the
/// reference it sits behind) plus the declared `'a: 'b` relations.
OutlivesSet
deriveBounds(const std::vector<std::vector<ExtractionFact>> &ArgFacts,
             const std::vector<std::pair<Lifetime, Lifetime>> &Declared = {});

} // namespace lifecheck

#endif // LIFECHECK_EXTRACTOR_H
