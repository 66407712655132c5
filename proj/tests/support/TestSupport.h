//===- TestSupport.h - Shared helpers for the unit tests --------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_TESTS_TESTSUPPORT_H
#define LIFECHECK_TESTS_TESTSUPPORT_H

#include "lifecheck/Extractor.h"
#include "lifecheck/Frontend.h"
#include "lifecheck/Model.h"

#include <random>
#include <string>
#include <vector>

namespace lifecheck::testing {

/// Absolute path of a file in the source tree.
std::string sourcePath(const std::string &Relative);
std::string readFile(const std::string &Path);

/// Parses \p Source and returns the function named \p Qualified; fails the
/// current test if it is missing.
const FunctionModel &functionIn(const CrateModel &Crate,
                                const std::string &Qualified);

/// `path: type : lifetime` strings, sorted, for set comparisons.
std::vector<std::string> factStrings(const std::vector<ExtractionFact> &Facts);

/// Finds the fact with the given printed path, or nullptr.
const ExtractionFact *factAt(const std::vector<ExtractionFact> &Facts,
                             const std::string &Path);

//===-- Random generators ------------------------------------------------===//

using Rng = std::mt19937_64;

/// One of 'a..'d, 'static or an anonymous lifetime.
Lifetime randomLifetime(Rng &R);

/// A random type at most \p Depth constructors deep, over a small alphabet
/// of names so that equal types come up often.
SubjectType randomType(Rng &R, unsigned Depth);

/// A straight-line body over locals v0..v{Vars-1}, each statement an Assign
/// of Use, RefTo or Aggregate, with places `v`, `v.f`, `*v` and `(*v).f`.
struct RandomProgram {
  Body B;
  ValuePath Source;
  ValuePath Target;
};
RandomProgram randomProgram(Rng &R, unsigned MaxStatements = 12,
                            unsigned Vars = 6);

/// Runs \p B over an explicit store in which the source cell starts out
/// holding a marker value and every other cell is undefined. Returns true if
/// the target place denotes a cell holding the marker at the end. Reading
/// through an undefined pointer stops execution (the program is stuck).
bool concreteFlows(const Body &B, const ValuePath &Source,
                   const ValuePath &Target);

/// `p = &x; q = p;` style helper: one block of statements.
Body straightLine(std::vector<Statement> Stmts);
Statement assign(Place Dst, Rvalue Rv);
Statement call(Place Dst, std::string Callee, std::vector<Place> Args);
ValuePath local(const std::string &Name);

} // namespace lifecheck::testing

#endif // LIFECHECK_TESTS_TESTSUPPORT_H
