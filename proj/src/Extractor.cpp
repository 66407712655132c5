//===- Extractor.cpp - Lifetime facts and outlives bounds -------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Extractor.h"

#include <algorithm>

namespace lifecheck {

bool ExtractionFact::behindImmutableOnly() const {
  if (DerefChain.empty())
    return false;
  return std::none_of(DerefChain.begin(), DerefChain.end(), [](auto K) {
    return K == SubjectType::Kind::UniqueRef || K == SubjectType::Kind::RawUnique;
  });
}

bool ExtractionFact::directMutPointee() const {
  const auto &Ps = Path.projections();
  for (auto It = Ps.rbegin(); It != Ps.rend(); ++It) {
    if (It->K == Projection::Kind::Index)
      continue;
    if (It->K != Projection::Kind::Deref || DerefChain.empty())
      return false;
    auto K = DerefChain.back();
    return K == SubjectType::Kind::UniqueRef || K == SubjectType::Kind::RawUnique;
  }
  return false;
}

bool ExtractionFact::behindMutable() const {
  return !DerefChain.empty() &&
         (DerefChain.back() == SubjectType::Kind::UniqueRef ||
          DerefChain.back() == SubjectType::Kind::RawUnique);
}

std::string ExtractionFact::str() const {
  return Path.str() + ": " + Type.str() + " : " +
         (BorrowedFor ? BorrowedFor->str() : std::string("owned")) +
         (ViaRaw ? " (raw)" : "");
}

namespace {

class Decomposer {
public:
  Decomposer(const StructTable &Structs, unsigned MaxDepth)
      : Structs(Structs), MaxDepth(MaxDepth) {}

  struct State {
    ValuePath Path;
    SubjectType Type;
    std::optional<Lifetime> Governing;
    bool ViaRaw = false;
    std::vector<SubjectType::Kind> Chain;
    /// Lifetime args of the nearest struct holding this value by value.
    std::vector<Lifetime> Enclosing;
    /// Structs entered by value since the last deref; the cycle cut.
    std::vector<std::string> ByValue;
  };

  void visit(const State &S) {
    Out.push_back({S.Path, S.Type, S.Governing, S.ViaRaw, S.Chain});
    using K = SubjectType::Kind;
    const SubjectType &T = S.Type;

    if (T.kind() == K::Generic) {
      // A bounded generic must also outlive each of its bounds.
      for (const Lifetime &B : T.lifetimeBounds())
        if (!S.Governing || B != *S.Governing)
          Out.push_back({S.Path, T, B, S.ViaRaw, S.Chain});
      return;
    }
    if (S.Path.depth() >= MaxDepth)
      return;

    switch (T.kind()) {
    case K::SharedRef:
    case K::UniqueRef: {
      State N = child(S, S.Path.deref(), T.inner());
      N.Governing = T.lifetime();
      N.Chain.push_back(T.kind());
      N.Enclosing.clear();
      N.ByValue.clear();
      visit(N);
      return;
    }
    case K::RawShared:
    case K::RawUnique: {
      State N = child(S, S.Path.deref(), T.inner());
      N.ViaRaw = true;
      N.Chain.push_back(T.kind());
      N.Enclosing.clear();
      N.ByValue.clear();
      if (S.Enclosing.empty()) {
        // Owned by the enclosing object, or a bare raw pointer: the
        // governing lifetime carries through.
        visit(N);
        return;
      }
      for (const Lifetime &L : S.Enclosing) {
        N.Governing = L;
        visit(N);
      }
      return;
    }
    case K::Slice:
      visit(child(S, S.Path.index(), T.inner()));
      return;
    case K::Adt: {
      const StructDef *Def = Structs.find(T.name());
      if (!Def || Def->Opaque) {
        for (std::size_t I = 0; I < T.typeArgs().size(); ++I) {
          State N = child(S, S.Path.typeArg(static_cast<unsigned>(I)),
                          T.typeArgs()[I]);
          N.Enclosing.assign(T.lifetimeArgs().begin(), T.lifetimeArgs().end());
          visit(N);
        }
        return;
      }
      if (std::find(S.ByValue.begin(), S.ByValue.end(), T.name()) !=
          S.ByValue.end())
        return;
      for (const auto &[Name, FieldTy] : Structs.instantiateFields(T)) {
        State N = child(S, S.Path.field(Name), FieldTy);
        N.Enclosing.assign(T.lifetimeArgs().begin(), T.lifetimeArgs().end());
        N.ByValue.push_back(T.name());
        visit(N);
      }
      return;
    }
    case K::Generic:
    case K::Prim:
      return;
    }
  }

  std::vector<ExtractionFact> Out;

private:
  static State child(const State &S, ValuePath Path, SubjectType Type) {
    State N = S;
    N.Path = std::move(Path);
    N.Type = std::move(Type);
    return N;
  }

  const StructTable &Structs;
  unsigned MaxDepth;
};

} // namespace

std::vector<ExtractionFact> decompose(const PathRoot &Root,
                                      const SubjectType &Type,
                                      const StructTable &Structs,
                                      unsigned MaxDepth) {
  Decomposer D(Structs, MaxDepth);
  Decomposer::State S{ValuePath(Root), Type, std::nullopt, false, {}, {}, {}};
  D.visit(S);
  return std::move(D.Out);
}

OutlivesSet::OutlivesSet(
    const std::vector<std::pair<Lifetime, Lifetime>> &Bounds) {
  for (const auto &[L, S] : Bounds)
    add(L, S);
}

void OutlivesSet::add(const Lifetime &Longer, const Lifetime &Shorter) {
  if (Longer == Shorter || Longer.isStatic())
    return;
  if (!Pairs.insert({Longer, Shorter}).second)
    return;
  // Keep the relation closed: everything above Longer now also outlives
  // everything below Shorter.
  std::vector<Lifetime> Above{Longer}, Below{Shorter};
  for (const auto &[A, B] : Pairs) {
    if (B == Longer)
      Above.push_back(A);
    if (A == Shorter)
      Below.push_back(B);
  }
  for (const Lifetime &A : Above)
    for (const Lifetime &B : Below)
      if (A != B)
        Pairs.insert({A, B});
}

bool OutlivesSet::outlives(const Lifetime &L1, const Lifetime &L2) const {
  // Anything bounded by 'static inherits the axiom.
  return L1 == L2 || L1.isStatic() || Pairs.count({L1, L2}) ||
         Pairs.count({L1, Lifetime::staticLifetime()});
}

OutlivesSet
deriveBounds(const std::vector<std::vector<ExtractionFact>> &ArgFacts,
             const std::vector<std::pair<Lifetime, Lifetime>> &Declared) {
  OutlivesSet Out(Declared);
  for (const auto &Facts : ArgFacts) {
    for (const ExtractionFact &Outer : Facts) {
      if (!Outer.Type.isRef())
        continue;
      const Lifetime &L = Outer.Type.lifetime();
      for (const ExtractionFact &Inner : Facts) {
        if (Inner.Path.depth() <= Outer.Path.depth() ||
            !Outer.Path.isPrefixOf(Inner.Path) || !Inner.BorrowedFor ||
            *Inner.BorrowedFor == L)
          continue;
        Out.add(*Inner.BorrowedFor, L);
      }
    }
  }
  return Out;
}

} // namespace lifecheck
