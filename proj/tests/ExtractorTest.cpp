//===- ExtractorTest.cpp --------------------------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestSupport.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace lifecheck;
using namespace lifecheck::testing;

namespace {

using Strings = std::vector<std::string>;

const Lifetime A = Lifetime::named("a");
const Lifetime B = Lifetime::named("b");
const Lifetime C = Lifetime::named("c");
const Lifetime Static = Lifetime::staticLifetime();

SubjectType i32() { return SubjectType::prim("i32"); }

ValuePath x() { return ValuePath(PathRoot::arg(0, "x")); }

std::vector<ExtractionFact> facts(const SubjectType &T,
                                  const StructTable &Structs = {},
                                  unsigned MaxDepth = DefaultMaxDepth) {
  return decompose(PathRoot::arg(0, "x"), T, Structs, MaxDepth);
}

StructTable structsFrom(const std::string &Source) {
  return parseCrate(Source, "t.rs").Structs;
}

//===-- One test per extraction rule --------------------------------------===//

TEST(ExtractRule, ContainsSelf) {
  auto F = facts(i32());
  EXPECT_EQ(factStrings(F), Strings{"x: i32 : owned"});
}

TEST(ExtractRule, Borrow) {
  auto F = facts(SubjectType::sharedRef(A, i32()));
  EXPECT_EQ(factStrings(F), (Strings{"*x: i32 : 'a", "x: &'a i32 : owned"}));
  const ExtractionFact *Inner = factAt(F, "*x");
  ASSERT_TRUE(Inner);
  EXPECT_TRUE(Inner->behindImmutableOnly());
  EXPECT_FALSE(Inner->behindMutable());
}

TEST(ExtractRule, MutBorrow) {
  auto F = facts(SubjectType::uniqueRef(A, i32()));
  const ExtractionFact *Inner = factAt(F, "*x");
  ASSERT_TRUE(Inner);
  EXPECT_EQ(Inner->BorrowedFor, A);
  EXPECT_TRUE(Inner->behindMutable());
  EXPECT_TRUE(Inner->directMutPointee());
  EXPECT_FALSE(Inner->behindImmutableOnly());
}

TEST(ExtractRule, FieldBehindBorrow) {
  StructTable S = structsFrom("struct Bar { y: String, n: i32 }");
  auto F = facts(SubjectType::sharedRef(B, SubjectType::adt("Bar")), S);
  // The value and all its fields must outlive 'b.
  const ExtractionFact *Y = factAt(F, "(*x).y");
  const ExtractionFact *N = factAt(F, "(*x).n");
  ASSERT_TRUE(Y && N);
  EXPECT_EQ(Y->BorrowedFor, B);
  EXPECT_EQ(N->BorrowedFor, B);
}

TEST(ExtractRule, FieldEpsilonOwned) {
  StructTable S = structsFrom("struct Bar { y: String }");
  auto F = facts(SubjectType::adt("Bar"), S);
  EXPECT_EQ(factStrings(F), (Strings{"x.y: String : owned", "x: Bar : owned"}));
}

TEST(ExtractRule, InnerLifetime) {
  auto F = facts(SubjectType::sharedRef(A, SubjectType::uniqueRef(B, i32())));
  const ExtractionFact *Mid = factAt(F, "*x");
  const ExtractionFact *Deep = factAt(F, "**x");
  ASSERT_TRUE(Mid && Deep);
  EXPECT_EQ(Mid->BorrowedFor, A);
  EXPECT_EQ(Deep->BorrowedFor, B);
  EXPECT_EQ(Deep->DerefChain,
            (std::vector{SubjectType::Kind::SharedRef, SubjectType::Kind::UniqueRef}));
}

TEST(ExtractRule, RawOwned) {
  StructTable S = structsFrom("struct Owner { p: *const i32 }");
  auto F = facts(SubjectType::adt("Owner"), S);
  const ExtractionFact *Pointee = factAt(F, "*(x.p)");
  ASSERT_TRUE(Pointee);
  EXPECT_FALSE(Pointee->BorrowedFor);
  EXPECT_TRUE(Pointee->ViaRaw);
  EXPECT_FALSE(Pointee->behindMutable());
}

TEST(ExtractRule, RawMutOwned) {
  StructTable S = structsFrom("struct Owner { p: *mut i32 }");
  auto F = facts(SubjectType::adt("Owner"), S);
  const ExtractionFact *Pointee = factAt(F, "*(x.p)");
  ASSERT_TRUE(Pointee);
  EXPECT_FALSE(Pointee->BorrowedFor);
  EXPECT_TRUE(Pointee->ViaRaw);
  EXPECT_TRUE(Pointee->behindMutable());
}

TEST(ExtractRule, RawLifetime) {
  StructTable S = structsFrom("struct View<'a> { p: *const i32 }");
  auto F = facts(SubjectType::adt("View", {A}), S);
  const ExtractionFact *Pointee = factAt(F, "*(x.p)");
  ASSERT_TRUE(Pointee);
  EXPECT_EQ(Pointee->BorrowedFor, A);
  EXPECT_TRUE(Pointee->ViaRaw);
}

TEST(ExtractRule, RawMutLifetime) {
  StructTable S = structsFrom("struct View<'a> { p: *mut i32 }");
  auto F = facts(SubjectType::adt("View", {A}), S);
  const ExtractionFact *Pointee = factAt(F, "*(x.p)");
  ASSERT_TRUE(Pointee);
  EXPECT_EQ(Pointee->BorrowedFor, A);
  EXPECT_TRUE(Pointee->directMutPointee());
}

TEST(ExtractRule, RawLifetimeWithTwoParams) {
  StructTable S = structsFrom("struct Two<'a, 'b> { p: *mut i32 }");
  auto F = facts(SubjectType::adt("Two", {A, B}), S);
  std::set<std::string> Lts;
  for (const ExtractionFact &Fact : F)
    if (Fact.Path.str() == "*(x.p)")
      Lts.insert(Fact.BorrowedFor ? Fact.BorrowedFor->str() : "owned");
  EXPECT_EQ(Lts, (std::set<std::string>{"'a", "'b"}));
}

TEST(BoundRule, InnerLonger) {
  auto F = facts(SubjectType::sharedRef(A, SubjectType::sharedRef(B, i32())));
  OutlivesSet Bounds = deriveBounds({F});
  EXPECT_TRUE(Bounds.outlives(B, A));
  EXPECT_FALSE(Bounds.outlives(A, B));
}

TEST(BoundRule, InnerLongerThroughStructParam) {
  StructTable S = parseCrate("pub struct MatrixSliceMut<'a, T: 'a> { ptr: *mut T }\n"
                             "pub struct RowMut<'a, T: 'a> { row: MatrixSliceMut<'a, T> }\n",
                             "t.rs")
                      .Structs;
  Lifetime Anon = Lifetime::anonymous(1);
  auto F = facts(SubjectType::uniqueRef(
                     Anon, SubjectType::adt("RowMut", {A},
                                            {SubjectType::generic("T", {A})})),
                 S);
  OutlivesSet Bounds = deriveBounds({F});
  EXPECT_TRUE(Bounds.outlives(A, Anon));
  EXPECT_FALSE(Bounds.outlives(Anon, A));
}

TEST(BoundRule, Reflexive) {
  OutlivesSet Empty;
  EXPECT_TRUE(Empty.outlives(A, A));
  EXPECT_TRUE(Empty.outlives(Lifetime::anonymous(3), Lifetime::anonymous(3)));
  EXPECT_TRUE(Empty.pairs().empty());
}

TEST(BoundRule, Static) {
  OutlivesSet Empty;
  EXPECT_TRUE(Empty.outlives(Static, B));
  EXPECT_FALSE(Empty.outlives(B, Static));
  // Axioms are not stored.
  OutlivesSet S({{Static, A}, {A, A}});
  EXPECT_TRUE(S.pairs().empty());
}

TEST(BoundRule, ExtractInnerThroughReference) {
  // &'c &'a &'b i32: the bound from the inner pair survives the outer borrow.
  auto F = facts(SubjectType::sharedRef(
      C, SubjectType::sharedRef(A, SubjectType::sharedRef(B, i32()))));
  OutlivesSet Bounds = deriveBounds({F});
  EXPECT_TRUE(Bounds.outlives(B, A));
  EXPECT_TRUE(Bounds.outlives(A, C));
  EXPECT_TRUE(Bounds.outlives(B, C));
}

TEST(BoundRule, ExtractInnerThroughField) {
  StructTable S = structsFrom("struct Pair<'a, 'b> { r: &'a &'b i32 }");
  auto F = facts(SubjectType::adt("Pair", {A, B}), S);
  OutlivesSet Bounds = deriveBounds({F});
  EXPECT_TRUE(Bounds.outlives(B, A));
  EXPECT_EQ(Bounds.pairs().size(), 1u);
}

//===-- Fixtures ----------------------------------------------------------===//

class Figure : public ::testing::Test {
protected:
  void SetUp() override {
    Crate = parseCrate(readFile(sourcePath("corpus/bugs/fig.rs")), "fig.rs");
  }
  CrateModel Crate;
};

TEST_F(Figure, Arg2Facts) {
  const FunctionModel &Bar = functionIn(Crate, "bar");
  auto F = decompose(PathRoot::arg(1, "arg2"), Bar.Params[1].Type, Crate.Structs);
  EXPECT_EQ(factStrings(F), (Strings{"(*arg2).y: String : 'b",
                                     "(*arg2).z: *mut i32 : 'b",
                                     "*(*arg2).z: i32 : 'b (raw)",
                                     "*arg2: Bar : 'b",
                                     "arg2: &'b mut Bar : owned"}));
}

TEST_F(Figure, RetFacts) {
  const FunctionModel &Bar = functionIn(Crate, "bar");
  auto F = decompose(PathRoot::ret(), *Bar.ReturnType, Crate.Structs);
  EXPECT_EQ(factStrings(F), (Strings{"*(ret.w): i32 : 'a",
                                     "*(ret.x): String : 'a (raw)",
                                     "ret.w: &'a mut i32 : owned",
                                     "ret.x: *mut String : owned",
                                     "ret: Foo<'a> : owned"}));
}

TEST_F(Figure, NoBoundBetweenArguments) {
  const FunctionModel &Bar = functionIn(Crate, "bar");
  std::vector<std::vector<ExtractionFact>> All;
  for (const auto &[Root, Ty] : Bar.arguments())
    All.push_back(decompose(Root, Ty, Crate.Structs));
  OutlivesSet Bounds = deriveBounds(All);
  EXPECT_FALSE(Bounds.outlives(A, B));
  EXPECT_FALSE(Bounds.outlives(B, A));
}

TEST(Outlives, OneElementClosure) {
  Lifetime Anon = Lifetime::anonymous(1);
  OutlivesSet S({{A, Anon}});
  EXPECT_TRUE(S.outlives(A, Anon));
  EXPECT_FALSE(S.outlives(Anon, A));
}

TEST(Outlives, DeclaredBoundsAreClosed) {
  OutlivesSet S({{A, B}, {B, C}});
  EXPECT_TRUE(S.outlives(A, C));
  EXPECT_FALSE(S.outlives(C, A));
}

//===-- Recursion and depth -----------------------------------------------===//

const char *LruSource = "struct LruEntry { next: *mut LruEntry, val: i32 }";

TEST(Decompose, RecursiveStructByHand) {
  StructTable S = structsFrom(LruSource);
  auto F = facts(SubjectType::adt("LruEntry"), S, 8);

  // Unroll by hand: an entry at depth d has next and val at d+1, and the
  // pointee of next at d+2, until the depth limit of 8 stops expansion.
  std::set<ValuePath> Expected;
  ValuePath Entry = x();
  for (unsigned D = 0; D <= 8; D += 2) {
    Expected.insert(Entry);
    if (D == 8)
      break;
    Expected.insert(Entry.field("next"));
    Expected.insert(Entry.field("val"));
    Entry = Entry.field("next").deref();
  }
  std::set<ValuePath> Got;
  for (const ExtractionFact &Fact : F)
    Got.insert(Fact.Path);
  EXPECT_EQ(Got, Expected);

  unsigned Nested = 0;
  for (const ExtractionFact &Fact : F)
    Nested += Fact.Path.depth() > 0 && Fact.Type.kind() == SubjectType::Kind::Adt;
  EXPECT_LE(Nested, 8u);
}

TEST(Decompose, ByValueCycleIsCut) {
  StructTable S;
  StructDef Loop;
  Loop.Name = "Loop";
  Loop.Fields = {{"inner", SubjectType::adt("Loop")}, {"n", i32()}};
  S.add(Loop);
  auto F = facts(SubjectType::adt("Loop"), S, 64);
  EXPECT_EQ(factStrings(F), (Strings{"x.inner: Loop : owned", "x.n: i32 : owned",
                                     "x: Loop : owned"}));
}

TEST(Decompose, SliceElementUsesIndex) {
  auto F = facts(SubjectType::uniqueRef(A, SubjectType::slice(i32())));
  const ExtractionFact *Elem = factAt(F, "(*x)[_]");
  ASSERT_TRUE(Elem);
  EXPECT_EQ(Elem->BorrowedFor, A);
}

TEST(Decompose, BoundedGenericGetsAFactPerBound) {
  auto F = facts(SubjectType::generic("F", {C}));
  EXPECT_EQ(factStrings(F), (Strings{"x: F : 'c", "x: F : owned"}));
}

std::set<std::string> factSet(const std::vector<ExtractionFact> &F) {
  auto V = factStrings(F);
  return {V.begin(), V.end()};
}

TEST(Decompose, MonotoneInDepthOnRecursiveStruct) {
  StructTable S = structsFrom(LruSource);
  for (unsigned D = 1; D < 16; ++D) {
    auto Small = factSet(facts(SubjectType::rawUnique(SubjectType::adt("LruEntry")),
                               S, D));
    auto Large = factSet(facts(SubjectType::rawUnique(SubjectType::adt("LruEntry")),
                               S, D + 1));
    EXPECT_TRUE(std::includes(Large.begin(), Large.end(), Small.begin(),
                              Small.end()))
        << "depth " << D;
    EXPECT_GT(Large.size(), Small.size()) << "depth " << D;
  }
}

StructTable randomStructs() {
  return structsFrom("struct Foo<'a, T> { p: *mut T, r: &'a T }\n"
                     "struct Bar<'a, T> { v: T, s: [u8] }\n");
}

TEST(Decompose, MonotoneInDepthOnRandomTypes) {
  Rng R(7);
  StructTable S = randomStructs();
  for (int I = 0; I < 300; ++I) {
    SubjectType T = randomType(R, 4);
    for (unsigned D = 1; D < 6; ++D) {
      auto Small = factSet(facts(T, S, D)), Large = factSet(facts(T, S, D + 1));
      ASSERT_TRUE(std::includes(Large.begin(), Large.end(), Small.begin(),
                                Small.end()))
          << T.str() << " at depth " << D;
    }
  }
}

TEST(Decompose, NoInventedLifetimes) {
  Rng R(11);
  StructTable S = randomStructs();
  for (int I = 0; I < 500; ++I) {
    SubjectType T = randomType(R, 4);
    auto Allowed = T.lifetimes();
    for (const ExtractionFact &F : facts(T, S))
      if (F.BorrowedFor) {
        ASSERT_NE(std::find(Allowed.begin(), Allowed.end(), *F.BorrowedFor),
                  Allowed.end())
            << T.str() << ": " << F.str();
      }
  }
}

TEST(Decompose, PathsAreWithinDepth) {
  Rng R(3);
  StructTable S = randomStructs();
  for (int I = 0; I < 200; ++I) {
    SubjectType T = randomType(R, 5);
    for (unsigned D = 1; D < 5; ++D)
      for (const ExtractionFact &F : facts(T, S, D))
        ASSERT_LE(F.Path.depth(), D) << T.str();
  }
}

//===-- Outlives properties -----------------------------------------------===//

TEST(OutlivesProperty, ReflexiveAndStaticOnRandomPairs) {
  Rng R(1);
  OutlivesSet Some({{A, B}, {Lifetime::anonymous(1), C}});
  for (int I = 0; I < 1000; ++I) {
    Lifetime L1 = randomLifetime(R), L2 = randomLifetime(R);
    ASSERT_TRUE(Some.outlives(L1, L1)) << L1.str();
    ASSERT_TRUE(Some.outlives(Static, L2)) << L2.str();
  }
}

/// Reachability over the explicit edges, by depth-first search. Reaching
/// 'static reaches everything.
bool reachable(const std::vector<std::pair<Lifetime, Lifetime>> &Edges,
               const Lifetime &From, const Lifetime &To) {
  if (From == To || From.isStatic())
    return true;
  std::set<Lifetime> Seen{From};
  std::vector<Lifetime> Work{From};
  while (!Work.empty()) {
    Lifetime L = Work.back();
    Work.pop_back();
    for (const auto &[Lo, Sh] : Edges)
      if (Lo == L && Seen.insert(Sh).second) {
        if (Sh == To || Sh.isStatic())
          return true;
        Work.push_back(Sh);
      }
  }
  return false;
}

TEST(OutlivesProperty, ClosureMatchesReachability) {
  Rng R(5);
  for (int Trial = 0; Trial < 200; ++Trial) {
    std::vector<std::pair<Lifetime, Lifetime>> Edges;
    unsigned N = std::uniform_int_distribution<unsigned>(0, 8)(R);
    for (unsigned I = 0; I < N; ++I)
      Edges.emplace_back(randomLifetime(R), randomLifetime(R));
    OutlivesSet S;
    for (const auto &[L, Sh] : Edges)
      S.add(L, Sh);
    for (int Q = 0; Q < 30; ++Q) {
      Lifetime L1 = randomLifetime(R), L2 = randomLifetime(R);
      ASSERT_EQ(S.outlives(L1, L2), reachable(Edges, L1, L2))
          << L1.str() << " : " << L2.str();
    }
  }
}

TEST(OutlivesProperty, Transitive) {
  Rng R(9);
  for (int Trial = 0; Trial < 1000; ++Trial) {
    OutlivesSet S;
    for (int I = 0; I < 5; ++I)
      S.add(randomLifetime(R), randomLifetime(R));
    Lifetime L1 = randomLifetime(R), L2 = randomLifetime(R),
             L3 = randomLifetime(R);
    if (S.outlives(L1, L2) && S.outlives(L2, L3)) {
      ASSERT_TRUE(S.outlives(L1, L3))
          << L1.str() << " " << L2.str() << " " << L3.str();
    }
  }
}

} // namespace
