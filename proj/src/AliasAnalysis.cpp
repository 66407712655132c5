//===- AliasAnalysis.cpp - Intra-procedural points-to confirmation ----------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Statement transfer, one deref level per Deref projection:
//
//   d = s        S(d) |= S(s), and every known subkey s.f is copied to d.f
//   d = &s       S(d) |= cells(s)
//   d = Agg{f:s} per field, as d.f = s
//   d = f(args)  cells reachable from each pair of arguments are merged both
//                ways; S(d) |= union of S over everything reached
//   return s     as ret = s
//
// Index and type-argument projections do not create keys of their own.
//
// Dereferencing a cell with an empty set allocates a fresh location, on the
// read side as well as the write side, so later statements agree on what an
// unknown pointer points to.
//
//===----------------------------------------------------------------------===//

#include "lifecheck/AliasAnalysis.h"

namespace lifecheck {

std::string Key::str() const {
  std::string Out = std::holds_alternative<PathRoot>(Base)
                        ? std::get<PathRoot>(Base).Name
                        : "L" + std::to_string(std::get<unsigned>(Base));
  for (const std::string &F : Fields)
    Out += "." + F;
  return Out;
}

Key PointsToState::alloc(AbstractLoc::Origin From, int Stmt, unsigned Arg) {
  AbstractLoc L;
  L.Id = static_cast<unsigned>(Locs.size());
  L.From = From;
  L.Stmt = Stmt;
  L.Arg = Arg;
  Locs.push_back(L);
  return Key{L.Id, {}};
}

Key PointsToState::child(const Key &K, std::string Field) const {
  if (K.Fields.size() >= Opts.MaxDepth)
    return K;
  Key Out = K;
  Out.Fields.push_back(std::move(Field));
  return Out;
}

std::set<Key> PointsToState::pointsTo(const Key &K) const {
  std::set<Key> Out;
  if (auto It = Env.find(K); It != Env.end())
    Out = It->second;
  if (!Opts.UnknownFields)
    return Out;
  // A field of an object a call may have written inherits that object's set.
  Key Up = K;
  while (!Up.Fields.empty()) {
    Up.Fields.pop_back();
    if (Linked.count(Up)) {
      if (auto Found = Env.find(Up); Found != Env.end())
        Out.insert(Found->second.begin(), Found->second.end());
      break;
    }
  }
  return Out;
}

std::set<Key> PointsToState::resolve(const Place &P, bool Alloc, int Stmt) {
  std::set<Key> Cells{Key{P.root(), {}}};
  auto Touch = [&](const std::set<Key> &Ks) {
    if (Alloc)
      for (const Key &K : Ks)
        Env[K];
  };
  Touch(Cells);
  for (const Projection &Pr : P.projections()) {
    std::set<Key> Next;
    switch (Pr.K) {
    case Projection::Kind::Field:
      for (const Key &K : Cells)
        Next.insert(child(K, Pr.Field));
      break;
    case Projection::Kind::TypeArg:
      // The contents of an opaque container share the container's cell, as
      // do all elements of a slice.
    case Projection::Kind::Index:
      Next = Cells;
      break;
    case Projection::Kind::Deref:
      for (const Key &K : Cells) {
        std::set<Key> Targets = pointsTo(K);
        if (Targets.empty() && Alloc) {
          bool ArgRoot = false;
          unsigned ArgIndex = 0;
          if (const auto *R = std::get_if<PathRoot>(&K.Base);
              R && K.Fields.empty() &&
              (R->K == PathRoot::Kind::Arg || R->K == PathRoot::Kind::Self)) {
            ArgRoot = true;
            ArgIndex = R->K == PathRoot::Kind::Arg ? R->Index + 1 : 0;
          }
          Key L = alloc(ArgRoot ? AbstractLoc::Origin::ArgRoot
                                : AbstractLoc::Origin::FreshFromDeref,
                        Stmt, ArgIndex);
          Env[K].insert(L);
          Targets.insert(L);
        }
        Next.insert(Targets.begin(), Targets.end());
      }
      break;
    }
    Cells = std::move(Next);
    Touch(Cells);
  }
  return Cells;
}

std::vector<std::pair<Key, std::vector<std::string>>>
PointsToState::subkeys(const Key &K) const {
  std::vector<std::pair<Key, std::vector<std::string>>> Out;
  for (auto It = Env.upper_bound(K); It != Env.end(); ++It) {
    const Key &Sub = It->first;
    if (Sub.Base != K.Base || Sub.Fields.size() <= K.Fields.size() ||
        !std::equal(K.Fields.begin(), K.Fields.end(), Sub.Fields.begin()))
      break;
    Out.emplace_back(Sub, std::vector<std::string>(
                              Sub.Fields.begin() + K.Fields.size(),
                              Sub.Fields.end()));
  }
  return Out;
}

std::set<Key> PointsToState::reach(const std::set<Key> &Cells) const {
  std::set<Key> Out;
  std::vector<Key> Work(Cells.begin(), Cells.end());
  while (!Work.empty()) {
    Key K = Work.back();
    Work.pop_back();
    if (!Out.insert(K).second)
      continue;
    for (auto &[Sub, Suffix] : subkeys(K))
      Work.push_back(Sub);
    for (const Key &T : pointsTo(K))
      Work.push_back(T);
  }
  return Out;
}

void PointsToState::addAll(const std::set<Key> &Into,
                           const std::set<Key> &Cells) {
  for (const Key &K : Into)
    Env[K].insert(Cells.begin(), Cells.end());
}

void PointsToState::copyInto(const std::set<Key> &Dst, const std::set<Key> &Src) {
  // Snapshot first: Dst and Src may overlap (`a = a.f`).
  std::set<Key> Values;
  std::vector<std::pair<std::vector<std::string>, std::set<Key>>> Subs;
  for (const Key &S : Src) {
    std::set<Key> V = pointsTo(S);
    Values.insert(V.begin(), V.end());
    for (auto &[Sub, Suffix] : subkeys(S))
      Subs.emplace_back(Suffix, pointsTo(Sub));
  }
  for (const Key &D : Dst) {
    Env[D].insert(Values.begin(), Values.end());
    for (const auto &[Suffix, V] : Subs) {
      Key Target = D;
      for (const std::string &F : Suffix)
        Target = child(Target, F);
      Env[Target].insert(V.begin(), V.end());
    }
  }
}

void PointsToState::transfer(const Statement &S, int Stmt) {
  if (const auto *A = std::get_if<AssignStmt>(&S.Kind)) {
    if (const auto *U = std::get_if<UseRv>(&A->Rv)) {
      std::set<Key> Src = resolve(U->Src, true, Stmt);
      copyInto(resolve(A->Dst, true, Stmt), Src);
    } else if (const auto *R = std::get_if<RefRv>(&A->Rv)) {
      std::set<Key> Src = resolve(R->Src, true, Stmt);
      addAll(resolve(A->Dst, true, Stmt), Src);
    } else {
      const auto &Agg = std::get<AggregateRv>(A->Rv);
      std::set<Key> Dst = resolve(A->Dst, true, Stmt);
      for (const auto &[Field, Operand] : Agg.Fields) {
        std::set<Key> FieldCells;
        for (const Key &D : Dst)
          FieldCells.insert(child(D, Field));
        addAll(FieldCells, {});
        if (Operand)
          copyInto(FieldCells, resolve(*Operand, true, Stmt));
      }
    }
    return;
  }
  if (const auto *C = std::get_if<CallStmt>(&S.Kind)) {
    std::vector<std::set<Key>> Reached;
    for (const Place &Arg : C->Args)
      Reached.push_back(reach(resolve(Arg, true, Stmt)));
    if (Opts.UnknownFields)
      for (const auto &R : Reached)
        Linked.insert(R.begin(), R.end());
    for (std::size_t I = 0; I < Reached.size(); ++I)
      for (std::size_t J = I + 1; J < Reached.size(); ++J)
        for (const Key &X : Reached[I])
          for (const Key &Y : Reached[J]) {
            std::set<Key> SX = pointsTo(X), SY = pointsTo(Y);
            SX.insert(SY.begin(), SY.end());
            Env[X] = SX;
            SY.insert(SX.begin(), SX.end());
            Env[Y] = SY;
          }
    std::set<Key> Result;
    for (const auto &R : Reached)
      for (const Key &K : R) {
        std::set<Key> V = pointsTo(K);
        Result.insert(V.begin(), V.end());
      }
    addAll(resolve(C->Dst, true, Stmt), Result);
    return;
  }
  const auto &R = std::get<ReturnStmt>(S.Kind);
  if (R.Value)
    copyInto({Key{PathRoot::ret(), {}}}, resolve(*R.Value, true, Stmt));
}

bool mayFlow(const Body &B, const ValuePath &Source, const ValuePath &Target,
             const AliasOptions &Opts) {
  PointsToState State(Opts);
  Key Src = State.alloc(AbstractLoc::Origin::SeededSource, -1);
  State.addAll(State.resolve(Source, true, -1), {Src});
  // Register the target's cells up front so the unknown-field exclusion
  // treats them as known.
  State.resolve(Target, true, -1);

  int Index = 0;
  for (unsigned Block : B.reversePostorder())
    for (const Statement &S : B.Blocks[Block].Statements)
      State.transfer(S, Index++);

  for (const Key &K : State.resolve(Target, false, -1))
    if (State.pointsTo(K).count(Src))
      return true;
  return false;
}

bool confirmCandidate(const FunctionModel &Fn, const CandidateViolation &C,
                      const AliasOptions &Opts) {
  if (!Fn.FnBody)
    throw BodyUnavailable(Fn.qualifiedName() + ": " +
                          (Fn.BodyDiagnostic.empty() ? "no body"
                                                     : Fn.BodyDiagnostic));
  const Body &B = *Fn.FnBody;
  switch (C.Form) {
  case NemForm::SourcePointer:
    return mayFlow(B, C.Source.Path.deref(), C.Target.Path, Opts);
  case NemForm::TargetPointer:
    return mayFlow(B, C.Source.Path, C.Target.Path.deref(), Opts);
  case NemForm::Pointee:
  case NemForm::None:
    return mayFlow(B, C.Source.Path, C.Target.Path, Opts);
  }
  return false;
}

} // namespace lifecheck
