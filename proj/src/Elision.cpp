//===- Elision.cpp - Lifetime elision expansion ----------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Input positions get fresh anonymous lifetimes numbered from 1 in argument
// order (self first, each type walked depth-first). An elided output lifetime
// binds to the only input lifetime if there is exactly one, otherwise to the
// lifetime of `&self`/`&mut self`. An explicit `'_` in output position is a
// fresh lifetime of its own.
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Frontend.h"

#include <algorithm>

namespace lifecheck {
namespace {

/// Pads struct types written without their lifetime arguments with elided
/// ones (`Iter<K, V>` for `Iter<'a, K, V>`).
SubjectType fillStructLifetimes(const SubjectType &T,
                                const StructTable &Structs) {
  using K = SubjectType::Kind;
  auto Rec = [&](const SubjectType &I) {
    return fillStructLifetimes(I, Structs);
  };
  switch (T.kind()) {
  case K::SharedRef:
    return SubjectType::sharedRef(T.lifetime(), Rec(T.inner()));
  case K::UniqueRef:
    return SubjectType::uniqueRef(T.lifetime(), Rec(T.inner()));
  case K::RawShared:
    return SubjectType::rawShared(Rec(T.inner()));
  case K::RawUnique:
    return SubjectType::rawUnique(Rec(T.inner()));
  case K::Slice:
    return SubjectType::slice(Rec(T.inner()));
  case K::Adt: {
    std::vector<Lifetime> Lts(T.lifetimeArgs().begin(), T.lifetimeArgs().end());
    if (const StructDef *Def = Structs.find(T.name()))
      while (Lts.size() < Def->LifetimeParams.size())
        Lts.push_back(Lifetime::elided());
    std::vector<SubjectType> Tys;
    for (const SubjectType &A : T.typeArgs())
      Tys.push_back(Rec(A));
    return SubjectType::adt(T.name(), std::move(Lts), std::move(Tys));
  }
  case K::Generic:
  case K::Prim:
    return T;
  }
  return T;
}

class Expander {
public:
  explicit Expander(const StructTable &Structs) : Structs(Structs) {}

  SubjectType input(const SubjectType &T) {
    SubjectType Filled = fillStructLifetimes(T, Structs);
    return Filled.mapLifetimes([&](const Lifetime &L) {
      Lifetime Out = L.isUnbound() ? Lifetime::anonymous(Next++) : L;
      if (std::find(Inputs.begin(), Inputs.end(), Out) == Inputs.end())
        Inputs.push_back(Out);
      return Out;
    });
  }

  SubjectType output(const SubjectType &T, const std::string &FnName) {
    SubjectType Filled = fillStructLifetimes(T, Structs);
    return Filled.mapLifetimes([&](const Lifetime &L) {
      switch (L.kind()) {
      case Lifetime::Kind::Wildcard:
        return Lifetime::anonymous(Next++);
      case Lifetime::Kind::Elided:
        return bindElided(FnName);
      default:
        return L;
      }
    });
  }

  std::optional<Lifetime> SelfRefLifetime;

private:
  Lifetime bindElided(const std::string &FnName) {
    if (Inputs.size() == 1)
      return Inputs.front();
    if (SelfRefLifetime)
      return *SelfRefLifetime;
    throw ElisionError("cannot infer output lifetime of '" + FnName + "': " +
                       std::to_string(Inputs.size()) +
                       " input lifetimes and no &self");
  }

  const StructTable &Structs;
  unsigned Next = 1;
  std::vector<Lifetime> Inputs;
};

} // namespace

FunctionModel expandElision(const FunctionModel &Fn, const StructTable &Structs) {
  FunctionModel Out = Fn;
  Expander E(Structs);

  if (Out.Self && Out.Self->Type) {
    Out.Self->Type = E.input(*Out.Self->Type);
    if (Out.Self->Type->isRef()) {
      Out.Self->RefLifetime = Out.Self->Type->lifetime();
      E.SelfRefLifetime = Out.Self->RefLifetime;
    }
  }
  for (Param &P : Out.Params)
    P.Type = E.input(P.Type);
  if (Out.ReturnType)
    Out.ReturnType = E.output(*Out.ReturnType, Fn.qualifiedName());
  return Out;
}

} // namespace lifecheck
