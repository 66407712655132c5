//===- PatternChecker.cpp - Signature-level violation patterns --------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/PatternChecker.h"

#include <algorithm>
#include <set>
#include <tuple>

namespace lifecheck {

const char *kindName(ViolationKind K) {
  switch (K) {
  case ViolationKind::UafArgReturn:
    return "uaf-arg-return";
  case ViolationKind::UafArgArg:
    return "uaf-arg-arg";
  case ViolationKind::NemArgReturn:
    return "nem-arg-return";
  }
  return "?";
}

std::optional<ViolationKind> parseKindName(const std::string &Name) {
  for (ViolationKind K : {ViolationKind::UafArgReturn, ViolationKind::UafArgArg,
                          ViolationKind::NemArgReturn})
    if (Name == kindName(K))
      return K;
  return std::nullopt;
}

namespace {

bool isPointer(const SubjectType &T) {
  return T.kind() == SubjectType::Kind::UniqueRef ||
         T.kind() == SubjectType::Kind::RawUnique;
}

bool rawInvolved(const ExtractionFact &A, const ExtractionFact &B) {
  return A.ViaRaw || B.ViaRaw || A.Type.isRaw() || B.Type.isRaw();
}

CandidateViolation make(ViolationKind K, const ExtractionFact &S,
                        const ExtractionFact &T, NemForm F = NemForm::None) {
  return CandidateViolation{K, S, T, F, "", {}};
}

} // namespace

std::vector<CandidateViolation>
checkArgReturnUaf(const std::vector<ExtractionFact> &ArgFacts,
                  const std::vector<ExtractionFact> &RetFacts,
                  const OutlivesSet &Bounds) {
  std::vector<CandidateViolation> Out;
  for (const ExtractionFact &S : ArgFacts) {
    if (!S.BorrowedFor)
      continue;
    for (const ExtractionFact &T : RetFacts) {
      if (!(S.ViaRaw || T.ViaRaw) || !typeEqual(S.Type, T.Type))
        continue;
      // Two values each reached straight through a mutable pointer are the
      // mutability pattern, not this one.
      if (S.directMutPointee() && T.directMutPointee())
        continue;
      bool Uaf1 = T.BorrowedFor && !Bounds.outlives(*S.BorrowedFor, *T.BorrowedFor);
      bool Uaf2 = !T.BorrowedFor;
      if (Uaf1 || Uaf2)
        Out.push_back(make(ViolationKind::UafArgReturn, S, T));
    }
  }
  return Out;
}

std::vector<CandidateViolation>
checkArgReturnNem(const std::vector<ExtractionFact> &ArgFacts,
                  const std::vector<ExtractionFact> &RetFacts,
                  const OutlivesSet &Bounds) {
  std::vector<CandidateViolation> Out;
  for (const ExtractionFact &S : ArgFacts) {
    if (!S.BorrowedFor)
      continue;
    for (const ExtractionFact &T : RetFacts) {
      if (!T.BorrowedFor || Bounds.outlives(*S.BorrowedFor, *T.BorrowedFor))
        continue;
      NemForm Form = NemForm::None;
      if (isPointer(S.Type) && typeEqual(S.Type.inner(), T.Type))
        Form = NemForm::SourcePointer;
      else if (isPointer(T.Type) && typeEqual(T.Type.inner(), S.Type))
        Form = NemForm::TargetPointer;
      else if (S.directMutPointee() && T.directMutPointee() &&
               typeEqual(S.Type, T.Type))
        Form = NemForm::Pointee;
      if (Form == NemForm::None)
        continue;
      bool Gate = Form == NemForm::Pointee ? (S.ViaRaw || T.ViaRaw)
                                           : rawInvolved(S, T);
      if (Gate)
        Out.push_back(make(ViolationKind::NemArgReturn, S, T, Form));
    }
  }
  return Out;
}

std::vector<CandidateViolation>
checkArgArgUaf(const std::vector<std::vector<ExtractionFact>> &ArgFactsByArg,
               const OutlivesSet &Bounds) {
  (void)Bounds; // any non-static transfer between the two is flagged
  std::vector<CandidateViolation> Out;
  MatchPolicy Wild{/*GenericWildcard=*/true};
  for (std::size_t I = 0; I < ArgFactsByArg.size(); ++I) {
    for (std::size_t J = I + 1; J < ArgFactsByArg.size(); ++J) {
      for (const ExtractionFact &A : ArgFactsByArg[I]) {
        if (!A.BorrowedFor)
          continue;
        for (const ExtractionFact &B : ArgFactsByArg[J]) {
          if (!B.BorrowedFor)
            continue;
          if (A.behindImmutableOnly() && B.behindImmutableOnly())
            continue;
          if (!typeEqual(A.Type, B.Type, Wild))
            continue;
          if (typeEqual(A.Type, B.Type)) {
            if (!A.ViaRaw && !B.ViaRaw)
              continue;
          } else {
            // Matched only through a bounded generic: the concrete side
            // must be the raw-held one.
            const ExtractionFact &Concrete =
                A.Type.kind() == SubjectType::Kind::Generic ? B : A;
            if (!Concrete.ViaRaw)
              continue;
          }
          // The value behind the mutable access receives the other.
          bool ATarget = A.behindMutable() && !B.behindMutable();
          const ExtractionFact &Src = ATarget ? B : A;
          const ExtractionFact &Dst = ATarget ? A : B;
          if (Src.BorrowedFor->isStatic())
            continue;
          Out.push_back(make(ViolationKind::UafArgArg, Src, Dst));
        }
      }
    }
  }
  return Out;
}

CheckResult checkFunction(const FunctionModel &Fn, const StructTable &Structs,
                          const CheckerOptions &Opts) {
  std::vector<std::vector<ExtractionFact>> PerArg;
  std::vector<ExtractionFact> ArgFacts;
  for (const auto &[Root, Ty] : Fn.arguments()) {
    PerArg.push_back(decompose(Root, Ty, Structs, Opts.MaxDepth));
    ArgFacts.insert(ArgFacts.end(), PerArg.back().begin(), PerArg.back().end());
  }
  OutlivesSet Bounds = deriveBounds(PerArg, Fn.LifetimeBounds);

  std::vector<CandidateViolation> All;
  if (Fn.ReturnType) {
    auto RetFacts = decompose(PathRoot::ret(), *Fn.ReturnType, Structs,
                              Opts.MaxDepth);
    auto Uaf = checkArgReturnUaf(ArgFacts, RetFacts, Bounds);
    auto Nem = checkArgReturnNem(ArgFacts, RetFacts, Bounds);
    All.insert(All.end(), Uaf.begin(), Uaf.end());
    All.insert(All.end(), Nem.begin(), Nem.end());
  }
  auto ArgArg = checkArgArgUaf(PerArg, Bounds);
  All.insert(All.end(), ArgArg.begin(), ArgArg.end());

  // Dedup on (kind, source, target) keeping the first occurrence.
  std::vector<CandidateViolation> Unique;
  std::set<std::tuple<ViolationKind, ValuePath, ValuePath>> Seen;
  for (CandidateViolation &C : All)
    if (Seen.insert({C.Kind, C.Source.Path, C.Target.Path}).second)
      Unique.push_back(std::move(C));

  auto ByName = [](const CandidateViolation &C) {
    return std::make_tuple(C.Kind, C.Source.Path.str(), C.Target.Path.str());
  };
  CheckResult R;
  if (Unique.size() > Opts.MaxCandidates) {
    // Keep the shallowest pairs; the deep tail is mostly the same flow seen
    // through more levels of a recursive struct.
    std::stable_sort(Unique.begin(), Unique.end(),
                     [&](const CandidateViolation &A, const CandidateViolation &B) {
                       std::size_t DA = A.Source.Path.depth() + A.Target.Path.depth();
                       std::size_t DB = B.Source.Path.depth() + B.Target.Path.depth();
                       if (DA != DB)
                         return DA < DB;
                       return ByName(A) < ByName(B);
                     });
    R.Diagnostic = Fn.qualifiedName() + ": " + std::to_string(Unique.size()) +
                   " candidates, truncated to " +
                   std::to_string(Opts.MaxCandidates);
    Unique.erase(Unique.begin() + Opts.MaxCandidates, Unique.end());
  }
  std::stable_sort(Unique.begin(), Unique.end(),
                   [&](const CandidateViolation &A, const CandidateViolation &B) {
                     return ByName(A) < ByName(B);
                   });
  for (CandidateViolation &C : Unique) {
    C.Function = Fn.qualifiedName();
    C.Span = Fn.Span;
  }
  R.Candidates = std::move(Unique);
  return R;
}

} // namespace lifecheck
