//===- TestSupport.cpp - Shared helpers for the unit tests ------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestSupport.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#ifndef LIFECHECK_SOURCE_DIR
#error "LIFECHECK_SOURCE_DIR must be defined"
#endif

namespace lifecheck::testing {

std::string sourcePath(const std::string &Relative) {
  return std::string(LIFECHECK_SOURCE_DIR) + "/" + Relative;
}

std::string readFile(const std::string &Path) {
  std::ifstream In(Path, std::ios::binary);
  std::ostringstream Buf;
  Buf << In.rdbuf();
  return Buf.str();
}

const FunctionModel &functionIn(const CrateModel &Crate,
                                const std::string &Qualified) {
  const FunctionModel *Fn = Crate.findFunction(Qualified);
  if (!Fn) {
    ADD_FAILURE() << "no function " << Qualified;
    static const FunctionModel Empty{};
    return Empty;
  }
  return *Fn;
}

std::vector<std::string> factStrings(const std::vector<ExtractionFact> &Facts) {
  std::vector<std::string> Out;
  for (const ExtractionFact &F : Facts)
    Out.push_back(F.str());
  std::sort(Out.begin(), Out.end());
  return Out;
}

const ExtractionFact *factAt(const std::vector<ExtractionFact> &Facts,
                             const std::string &Path) {
  for (const ExtractionFact &F : Facts)
    if (F.Path.str() == Path)
      return &F;
  return nullptr;
}

//===-- Random generators ------------------------------------------------===//

static unsigned pick(Rng &R, unsigned N) {
  return std::uniform_int_distribution<unsigned>(0, N - 1)(R);
}

Lifetime randomLifetime(Rng &R) {
  switch (pick(R, 6)) {
  case 0:
    return Lifetime::staticLifetime();
  case 1:
    return Lifetime::anonymous(1 + pick(R, 3));
  default:
    return Lifetime::named(std::string(1, char('a' + pick(R, 4))));
  }
}

SubjectType randomType(Rng &R, unsigned Depth) {
  unsigned Choice = Depth == 0 ? pick(R, 3) : pick(R, 9);
  switch (Choice) {
  case 0:
    return SubjectType::prim(pick(R, 2) ? "i32" : "u8");
  case 1:
    return SubjectType::generic(pick(R, 2) ? "T" : "U",
                                pick(R, 2) ? std::vector<Lifetime>{}
                                           : std::vector{randomLifetime(R)});
  case 2:
    return SubjectType::adt("String");
  case 3:
    return SubjectType::sharedRef(randomLifetime(R), randomType(R, Depth - 1));
  case 4:
    return SubjectType::uniqueRef(randomLifetime(R), randomType(R, Depth - 1));
  case 5:
    return SubjectType::rawShared(randomType(R, Depth - 1));
  case 6:
    return SubjectType::rawUnique(randomType(R, Depth - 1));
  case 7:
    return SubjectType::slice(randomType(R, Depth - 1));
  default:
    return SubjectType::adt(pick(R, 2) ? "Foo" : "Bar", {randomLifetime(R)},
                            {randomType(R, Depth - 1)});
  }
}

ValuePath local(const std::string &Name) {
  return ValuePath(PathRoot::local(Name));
}

Statement assign(Place Dst, Rvalue Rv) {
  Statement S;
  S.Kind = AssignStmt{std::move(Dst), std::move(Rv)};
  return S;
}

Statement call(Place Dst, std::string Callee, std::vector<Place> Args) {
  Statement S;
  S.Kind = CallStmt{std::move(Dst), std::move(Callee), std::move(Args)};
  return S;
}

Body straightLine(std::vector<Statement> Stmts) {
  Body B;
  B.Blocks.push_back(BasicBlock{std::move(Stmts), {}});
  return B;
}

static const char *const FieldNames[] = {"f", "g"};

/// `v`, `v.f`, `*v` or `(*v).f` over a random variable.
static ValuePath randomPlace(Rng &R, unsigned Vars, bool AllowDeref) {
  ValuePath P = local("v" + std::to_string(pick(R, Vars)));
  switch (pick(R, AllowDeref ? 4 : 2)) {
  case 0:
    return P;
  case 1:
    return P.field(FieldNames[pick(R, 2)]);
  case 2:
    return P.deref();
  default:
    return P.deref().field(FieldNames[pick(R, 2)]);
  }
}

RandomProgram randomProgram(Rng &R, unsigned MaxStatements, unsigned Vars) {
  RandomProgram P;
  std::vector<Statement> Stmts;
  unsigned N = 1 + pick(R, MaxStatements);
  for (unsigned I = 0; I < N; ++I) {
    ValuePath Dst = randomPlace(R, Vars, true);
    unsigned Kind = pick(R, 7);
    if (Kind < 3) {
      Stmts.push_back(assign(Dst, UseRv{randomPlace(R, Vars, true)}));
    } else if (Kind < 6) {
      Stmts.push_back(
          assign(Dst, RefRv{randomPlace(R, Vars, true), pick(R, 2) == 0}));
    } else {
      AggregateRv Agg;
      Agg.Adt = "S";
      for (const char *F : FieldNames) {
        if (pick(R, 3) == 0)
          Agg.Fields.emplace_back(F, std::nullopt);
        else
          Agg.Fields.emplace_back(F, randomPlace(R, Vars, true));
      }
      // Aggregates build a whole value; keep them at variable roots so the
      // concrete store stays one field level deep.
      Stmts.push_back(assign(local("v" + std::to_string(pick(R, Vars))), Agg));
    }
  }
  P.B = straightLine(std::move(Stmts));
  P.Source = randomPlace(R, Vars, false);
  P.Target = randomPlace(R, Vars, true);
  return P;
}

//===-- Concrete interpreter ---------------------------------------------===//

namespace {

/// A concrete memory cell: a variable plus an optional field.
struct Cell {
  std::string Var;
  std::string Field;
  auto operator<=>(const Cell &) const = default;
};

struct Marker {};
using Value = std::variant<std::monostate, Marker, Cell>;

class Interpreter {
public:
  std::optional<Cell> place(const ValuePath &P) const {
    Cell C{P.root().Name, ""};
    for (const Projection &Pr : P.projections()) {
      switch (Pr.K) {
      case Projection::Kind::Field:
        if (!C.Field.empty())
          return std::nullopt; // deeper than the store models
        C.Field = Pr.Field;
        break;
      case Projection::Kind::Deref: {
        const Cell *Target = std::get_if<Cell>(&get(C));
        if (!Target)
          return std::nullopt;
        C = *Target;
        break;
      }
      default:
        return std::nullopt;
      }
    }
    return C;
  }

  const Value &get(const Cell &C) const {
    static const Value Undef;
    auto It = Store.find(C);
    return It == Store.end() ? Undef : It->second;
  }

  void set(const Cell &C, Value V) { Store[C] = std::move(V); }

  /// Whole-value copy: a variable's fields travel with it.
  void copy(const Cell &Dst, const Cell &Src) {
    Value Top = get(Src);
    std::vector<std::pair<std::string, Value>> Subs;
    for (const char *F : FieldNames)
      Subs.emplace_back(F, Src.Field.empty() ? get(Cell{Src.Var, F}) : Value{});
    set(Dst, Top);
    if (Dst.Field.empty())
      for (auto &[F, V] : Subs)
        set(Cell{Dst.Var, F}, V);
  }

  void clearFields(const Cell &C) {
    if (C.Field.empty())
      for (const char *F : FieldNames)
        set(Cell{C.Var, F}, Value{});
  }

  /// Returns false once the program is stuck.
  bool step(const Statement &S) {
    const auto *A = std::get_if<AssignStmt>(&S.Kind);
    if (!A)
      return true;
    if (const auto *U = std::get_if<UseRv>(&A->Rv)) {
      auto Src = place(U->Src);
      if (!Src)
        return false;
      auto Dst = place(A->Dst);
      if (!Dst)
        return false;
      copy(*Dst, *Src);
      return true;
    }
    if (const auto *Ref = std::get_if<RefRv>(&A->Rv)) {
      auto Src = place(Ref->Src);
      if (!Src)
        return false;
      auto Dst = place(A->Dst);
      if (!Dst)
        return false;
      set(*Dst, *Src);
      clearFields(*Dst);
      return true;
    }
    const auto &Agg = std::get<AggregateRv>(A->Rv);
    std::vector<std::pair<std::string, Value>> Vals;
    for (const auto &[F, Op] : Agg.Fields) {
      if (!Op) {
        Vals.emplace_back(F, Value{});
        continue;
      }
      auto Src = place(*Op);
      if (!Src)
        return false;
      Vals.emplace_back(F, get(*Src));
    }
    auto Dst = place(A->Dst);
    if (!Dst || !Dst->Field.empty())
      return false;
    set(*Dst, Value{});
    for (auto &[F, V] : Vals)
      set(Cell{Dst->Var, F}, V);
    return true;
  }

  std::map<Cell, Value> Store;
};

} // namespace

bool concreteFlows(const Body &B, const ValuePath &Source,
                   const ValuePath &Target) {
  Interpreter I;
  auto Src = I.place(Source);
  if (!Src)
    return false;
  I.set(*Src, Marker{});
  for (unsigned Block : B.reversePostorder())
    for (const Statement &S : B.Blocks[Block].Statements)
      if (!I.step(S))
        goto Done;
Done:
  auto T = I.place(Target);
  return T && std::holds_alternative<Marker>(I.get(*T));
}

} // namespace lifecheck::testing
