//===- ModelTest.cpp ------------------------------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestSupport.h"

#include <gtest/gtest.h>

using namespace lifecheck;
using namespace lifecheck::testing;

namespace {

SubjectType i32() { return SubjectType::prim("i32"); }

TEST(TypeEqual, Basics) {
  EXPECT_TRUE(typeEqual(i32(), i32()));
  EXPECT_FALSE(typeEqual(SubjectType::rawUnique(i32()), i32()));
  EXPECT_TRUE(typeEqual(SubjectType::adt("String"), SubjectType::adt("String")));
  EXPECT_FALSE(typeEqual(SubjectType::slice(i32()), i32()));
  EXPECT_FALSE(typeEqual(SubjectType::rawShared(i32()), SubjectType::rawUnique(i32())));
}

TEST(TypeEqual, IgnoresLifetimes) {
  auto A = SubjectType::sharedRef(Lifetime::named("a"), i32());
  auto B = SubjectType::sharedRef(Lifetime::named("b"), i32());
  EXPECT_TRUE(typeEqual(A, B));
  EXPECT_FALSE(A == B);
}

TEST(TypeEqual, GenericWildcardNeedsABound) {
  MatchPolicy Wild{true};
  auto Bounded = SubjectType::generic("F", {Lifetime::named("c")});
  auto Unbounded = SubjectType::generic("F");
  auto Raw = SubjectType::rawUnique(SubjectType::adt("sqlite3"));
  EXPECT_TRUE(typeEqual(Bounded, Raw, Wild));
  EXPECT_TRUE(typeEqual(Raw, Bounded, Wild));
  EXPECT_FALSE(typeEqual(Unbounded, Raw, Wild));
  EXPECT_FALSE(typeEqual(Bounded, Raw));
}

TEST(TypeEqual, EquivalenceOnRandomTypes) {
  Rng R(7);
  std::vector<SubjectType> Pool;
  for (int I = 0; I < 60; ++I)
    Pool.push_back(randomType(R, 3));
  for (const auto &A : Pool) {
    EXPECT_TRUE(typeEqual(A, A)) << A.str();
    for (const auto &B : Pool) {
      EXPECT_EQ(typeEqual(A, B), typeEqual(B, A));
      if (!typeEqual(A, B))
        continue;
      for (const auto &C : Pool)
        if (typeEqual(B, C)) {
          EXPECT_TRUE(typeEqual(A, C))
              << A.str() << " ~ " << B.str() << " ~ " << C.str();
        }
    }
  }
}

TEST(ValuePath, Printing) {
  ValuePath Arg2(PathRoot::arg(1, "arg2"));
  EXPECT_EQ(Arg2.deref().field("y").str(), "(*arg2).y");
  EXPECT_EQ(ValuePath(PathRoot::ret()).field("x").deref().str(), "*(ret.x)");
  EXPECT_EQ(Arg2.deref().field("z").deref().str(), "*(*arg2).z");
  EXPECT_EQ(ValuePath(PathRoot::ret()).deref().index().str(), "(*ret)[_]");
  EXPECT_TRUE(Arg2.isPrefixOf(Arg2.deref().field("y")));
  EXPECT_FALSE(Arg2.deref().field("y").isPrefixOf(Arg2));
}

TEST(TypeOfPath, FollowsFieldsAndDerefs) {
  CrateModel C = parseCrate("struct Bar { y: String, z: *mut i32 }\n"
                            "fn f<'b>(arg2: &'b mut Bar) {}\n",
                            "t.rs");
  const FunctionModel &F = functionIn(C, "f");
  auto Roots = F.arguments();
  ValuePath P = ValuePath(Roots[0].first).deref().field("z").deref();
  auto T = typeOfPath(P, Roots, C.Structs);
  ASSERT_TRUE(T);
  EXPECT_EQ(T->str(), "i32");
  EXPECT_FALSE(typeOfPath(ValuePath(Roots[0].first).field("y"), Roots, C.Structs));
}

TEST(ResolveSelf, ExpandsMethodReceivers) {
  CrateModel C = parseCrate(
      "pub struct MatrixSliceMut<'a, T: 'a> { ptr: *mut T }\n"
      "pub struct RowMut<'a, T: 'a> { row: MatrixSliceMut<'a, T> }\n"
      "impl<'a, T: 'a> RowMut<'a, T> {\n"
      "  pub fn raw_slice_mut(&'_ mut self) -> &'a mut [T] { loop {} }\n"
      "}\n"
      "pub struct LruCache<K, V, S> { cap: usize }\n"
      "impl<K, V, S> LruCache<K, V, S> {\n"
      "  pub fn iter<'a>(&'_ self) -> Iter<'a, K, V> { loop {} }\n"
      "}\n"
      "pub struct Iter<'a, K: 'a, V: 'a> { ptr: *const K }\n",
      "t.rs");
  const FunctionModel &Raw = functionIn(C, "RowMut::raw_slice_mut");
  ASSERT_TRUE(Raw.Self && Raw.Self->Type);
  const SubjectType &S = *Raw.Self->Type;
  EXPECT_EQ(S.kind(), SubjectType::Kind::UniqueRef);
  EXPECT_EQ(S.lifetime().kind(), Lifetime::Kind::Anonymous);
  EXPECT_EQ(S.inner().str(), "RowMut<'a, T>");

  const FunctionModel &Iter = functionIn(C, "LruCache::iter");
  ASSERT_TRUE(Iter.Self && Iter.Self->Type);
  EXPECT_EQ(Iter.Self->Type->kind(), SubjectType::Kind::SharedRef);
  EXPECT_EQ(Iter.Self->Type->lifetime().kind(), Lifetime::Kind::Anonymous);
  EXPECT_EQ(Iter.Self->Type->inner().name(), "LruCache");
}

TEST(ResolveSelf, FreeFunctionUnchanged) {
  CrateModel C = parseCrate("fn f(x: &i32) -> &i32 { x }\n", "t.rs");
  const FunctionModel &F = functionIn(C, "f");
  FunctionModel Again = resolveSelf(F, C.Structs);
  EXPECT_FALSE(Again.Self);
  ASSERT_EQ(Again.Params.size(), 1u);
  EXPECT_EQ(Again.Params[0].Type, F.Params[0].Type);
}

TEST(ResolveSelf, UnknownStructIsAnError) {
  FunctionModel F;
  F.Name = "m";
  F.ImplOf = ImplRef{"Missing", {}, {}, std::nullopt};
  F.Self = SelfParam{};
  EXPECT_THROW(resolveSelf(F, StructTable{}), ModelError);
}

TEST(Body, VerifyRejectsBadSuccessors) {
  Body B = straightLine({});
  B.Blocks[0].Successors.push_back(3);
  EXPECT_THROW(B.verify(), ModelError);

  Body R = straightLine({Statement{ReturnStmt{}, 0}});
  R.Blocks[0].Successors.push_back(0);
  EXPECT_THROW(R.verify(), ModelError);
}

TEST(Body, ReversePostorderOfDiamond) {
  Body B;
  B.Blocks.resize(4);
  B.Blocks[0].Successors = {1, 2};
  B.Blocks[1].Successors = {3};
  B.Blocks[2].Successors = {3};
  auto Order = B.reversePostorder();
  ASSERT_EQ(Order.size(), 4u);
  EXPECT_EQ(Order.front(), 0u);
  EXPECT_EQ(Order.back(), 3u);
}

TEST(Lifetime, Printing) {
  EXPECT_EQ(Lifetime::named("a").str(), "'a");
  EXPECT_EQ(Lifetime::staticLifetime().str(), "'static");
  EXPECT_NE(Lifetime::anonymous(1), Lifetime::anonymous(2));
  EXPECT_EQ(Lifetime::anonymous(3), Lifetime::anonymous(3));
}

} // namespace
