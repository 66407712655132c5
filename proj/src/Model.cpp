//===- Model.cpp - Types, lifetimes and body IR ----------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Model.h"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

namespace lifecheck {

Lifetime Lifetime::named(std::string Name) {
  assert(!Name.empty() && "named lifetimes need an identifier");
  if (Name == "static")
    return staticLifetime();
  return Lifetime(Kind::Named, std::move(Name), 0);
}

std::string Lifetime::str() const {
  switch (K) {
  case Kind::Named:
    return "'" + Name;
  case Kind::Static:
    return "'static";
  case Kind::Anonymous:
    return "'_" + std::to_string(Id);
  case Kind::Elided:
  case Kind::Wildcard:
    return "'_";
  }
  return "'?";
}

//===-- SubjectType -------------------------------------------------------===//

SubjectType SubjectType::make(Kind K, std::string Name, std::vector<Lifetime> Lts,
                              std::vector<SubjectType> Tys) {
  return SubjectType(std::make_shared<const Node>(
      Node{K, std::move(Name), std::move(Lts), std::move(Tys)}));
}

SubjectType SubjectType::sharedRef(Lifetime L, SubjectType Inner) {
  return make(Kind::SharedRef, "", {std::move(L)}, {std::move(Inner)});
}
SubjectType SubjectType::uniqueRef(Lifetime L, SubjectType Inner) {
  return make(Kind::UniqueRef, "", {std::move(L)}, {std::move(Inner)});
}
SubjectType SubjectType::rawShared(SubjectType Inner) {
  return make(Kind::RawShared, "", {}, {std::move(Inner)});
}
SubjectType SubjectType::rawUnique(SubjectType Inner) {
  return make(Kind::RawUnique, "", {}, {std::move(Inner)});
}
SubjectType SubjectType::adt(std::string Name, std::vector<Lifetime> LifetimeArgs,
                             std::vector<SubjectType> TypeArgs) {
  return make(Kind::Adt, std::move(Name), std::move(LifetimeArgs),
              std::move(TypeArgs));
}
SubjectType SubjectType::slice(SubjectType Element) {
  return make(Kind::Slice, "", {}, {std::move(Element)});
}
SubjectType SubjectType::generic(std::string Name, std::vector<Lifetime> Bounds) {
  return make(Kind::Generic, std::move(Name), std::move(Bounds), {});
}
SubjectType SubjectType::prim(std::string Name) {
  return make(Kind::Prim, std::move(Name), {}, {});
}

SubjectType::Kind SubjectType::kind() const { return N->K; }

const Lifetime &SubjectType::lifetime() const {
  assert(isRef() && "only references carry a lifetime");
  return N->Lifetimes.front();
}

const SubjectType &SubjectType::inner() const {
  assert((isRef() || isRaw() || kind() == Kind::Slice) && "no inner type");
  return N->Types.front();
}

const std::string &SubjectType::name() const { return N->Name; }

std::span<const Lifetime> SubjectType::lifetimeArgs() const {
  if (kind() != Kind::Adt)
    return {};
  return N->Lifetimes;
}

std::span<const Lifetime> SubjectType::lifetimeBounds() const {
  if (kind() != Kind::Generic)
    return {};
  return N->Lifetimes;
}

std::span<const SubjectType> SubjectType::typeArgs() const {
  if (kind() != Kind::Adt)
    return {};
  return N->Types;
}

std::vector<Lifetime> SubjectType::lifetimes() const {
  std::vector<Lifetime> Out(N->Lifetimes.begin(), N->Lifetimes.end());
  for (const SubjectType &T : N->Types) {
    auto Sub = T.lifetimes();
    Out.insert(Out.end(), Sub.begin(), Sub.end());
  }
  return Out;
}

bool SubjectType::operator==(const SubjectType &Other) const {
  if (N == Other.N)
    return true;
  return N->K == Other.N->K && N->Name == Other.N->Name &&
         N->Lifetimes == Other.N->Lifetimes && N->Types == Other.N->Types;
}

std::string SubjectType::str() const {
  auto lifetimePrefix = [](const Lifetime &L) {
    return L.kind() == Lifetime::Kind::Elided ? std::string() : L.str() + " ";
  };
  switch (kind()) {
  case Kind::SharedRef:
    return "&" + lifetimePrefix(lifetime()) + inner().str();
  case Kind::UniqueRef:
    return "&" + lifetimePrefix(lifetime()) + "mut " + inner().str();
  case Kind::RawShared:
    return "*const " + inner().str();
  case Kind::RawUnique:
    return "*mut " + inner().str();
  case Kind::Slice:
    return "[" + inner().str() + "]";
  case Kind::Generic:
  case Kind::Prim:
    return name();
  case Kind::Adt: {
    std::string Out = name();
    std::vector<std::string> Args;
    for (const Lifetime &L : lifetimeArgs())
      Args.push_back(L.str());
    for (const SubjectType &T : typeArgs())
      Args.push_back(T.str());
    if (!Args.empty()) {
      Out += "<";
      for (std::size_t I = 0; I < Args.size(); ++I)
        Out += (I ? ", " : "") + Args[I];
      Out += ">";
    }
    return Out;
  }
  }
  return "?";
}

bool typeEqual(const SubjectType &A, const SubjectType &B, MatchPolicy Policy) {
  using Kind = SubjectType::Kind;
  if (Policy.GenericWildcard) {
    if (A.kind() == Kind::Generic && !A.lifetimeBounds().empty())
      return true;
    if (B.kind() == Kind::Generic && !B.lifetimeBounds().empty())
      return true;
  }
  if (A.kind() != B.kind())
    return false;
  switch (A.kind()) {
  case Kind::SharedRef:
  case Kind::UniqueRef:
  case Kind::RawShared:
  case Kind::RawUnique:
  case Kind::Slice:
    return typeEqual(A.inner(), B.inner(), Policy);
  case Kind::Generic:
  case Kind::Prim:
    return A.name() == B.name();
  case Kind::Adt: {
    if (A.name() != B.name() || A.typeArgs().size() != B.typeArgs().size())
      return false;
    for (std::size_t I = 0; I < A.typeArgs().size(); ++I)
      if (!typeEqual(A.typeArgs()[I], B.typeArgs()[I], Policy))
        return false;
    return true;
  }
  }
  return false;
}

//===-- Structs -----------------------------------------------------------===//

const SubjectType *StructDef::field(const std::string &FieldName) const {
  for (const auto &[Name, Ty] : Fields)
    if (Name == FieldName)
      return &Ty;
  return nullptr;
}

void StructTable::add(StructDef Def) {
  std::string Name = Def.Name;
  Defs.insert_or_assign(std::move(Name), std::move(Def));
}

const StructDef *StructTable::find(const std::string &Name) const {
  auto It = Defs.find(Name);
  return It == Defs.end() ? nullptr : &It->second;
}

namespace {

SubjectType substitute(const SubjectType &T,
                       const std::map<std::string, Lifetime> &Lts,
                       const std::map<std::string, SubjectType> &Tys) {
  using Kind = SubjectType::Kind;
  auto mapLt = [&](const Lifetime &L) {
    if (L.kind() == Lifetime::Kind::Named) {
      auto It = Lts.find(L.name());
      if (It != Lts.end())
        return It->second;
    }
    return L;
  };
  switch (T.kind()) {
  case Kind::SharedRef:
    return SubjectType::sharedRef(mapLt(T.lifetime()),
                                  substitute(T.inner(), Lts, Tys));
  case Kind::UniqueRef:
    return SubjectType::uniqueRef(mapLt(T.lifetime()),
                                  substitute(T.inner(), Lts, Tys));
  case Kind::RawShared:
    return SubjectType::rawShared(substitute(T.inner(), Lts, Tys));
  case Kind::RawUnique:
    return SubjectType::rawUnique(substitute(T.inner(), Lts, Tys));
  case Kind::Slice:
    return SubjectType::slice(substitute(T.inner(), Lts, Tys));
  case Kind::Generic: {
    auto It = Tys.find(T.name());
    if (It != Tys.end())
      return It->second;
    std::vector<Lifetime> Bounds;
    for (const Lifetime &L : T.lifetimeBounds())
      Bounds.push_back(mapLt(L));
    return SubjectType::generic(T.name(), std::move(Bounds));
  }
  case Kind::Prim:
    return T;
  case Kind::Adt: {
    std::vector<Lifetime> LArgs;
    for (const Lifetime &L : T.lifetimeArgs())
      LArgs.push_back(mapLt(L));
    std::vector<SubjectType> TArgs;
    for (const SubjectType &A : T.typeArgs())
      TArgs.push_back(substitute(A, Lts, Tys));
    return SubjectType::adt(T.name(), std::move(LArgs), std::move(TArgs));
  }
  }
  return T;
}

} // namespace

std::vector<std::pair<std::string, SubjectType>>
StructTable::instantiateFields(const SubjectType &Adt) const {
  std::vector<std::pair<std::string, SubjectType>> Out;
  if (Adt.kind() != SubjectType::Kind::Adt)
    return Out;
  const StructDef *Def = find(Adt.name());
  if (!Def || Def->Opaque)
    return Out;
  std::map<std::string, Lifetime> Lts;
  for (std::size_t I = 0;
       I < Def->LifetimeParams.size() && I < Adt.lifetimeArgs().size(); ++I)
    Lts.emplace(Def->LifetimeParams[I], Adt.lifetimeArgs()[I]);
  std::map<std::string, SubjectType> Tys;
  for (std::size_t I = 0; I < Def->TypeParams.size() && I < Adt.typeArgs().size();
       ++I)
    Tys.emplace(Def->TypeParams[I], Adt.typeArgs()[I]);
  for (const auto &[Name, Ty] : Def->Fields)
    Out.emplace_back(Name, substitute(Ty, Lts, Tys));
  return Out;
}

//===-- ValuePath ---------------------------------------------------------===//

ValuePath ValuePath::with(Projection P) const {
  ValuePath Out = *this;
  Out.Projs.push_back(std::move(P));
  return Out;
}

bool ValuePath::isPrefixOf(const ValuePath &Other) const {
  if (Root != Other.Root || Projs.size() > Other.Projs.size())
    return false;
  return std::equal(Projs.begin(), Projs.end(), Other.Projs.begin());
}

std::string ValuePath::str() const {
  std::string Out = Root.Name;
  // Deref only parenthesizes a field chain that starts at a bare root, so the
  // output reads `*arg1`, `*(ret.x)`, `*(*arg2).z`, `(*arg2).y`.
  for (const Projection &P : Projs) {
    bool StartsWithDeref = !Out.empty() && Out.front() == '*';
    switch (P.K) {
    case Projection::Kind::Deref:
      if (Out.find_first_of(".[") == std::string::npos || Out.front() == '(' ||
          StartsWithDeref)
        Out = "*" + Out;
      else
        Out = "*(" + Out + ")";
      break;
    case Projection::Kind::Field:
      Out = (StartsWithDeref ? "(" + Out + ")" : Out) + "." + P.Field;
      break;
    case Projection::Kind::Index:
      Out = (StartsWithDeref ? "(" + Out + ")" : Out) + "[_]";
      break;
    case Projection::Kind::TypeArg:
      Out = (StartsWithDeref ? "(" + Out + ")" : Out) + ".<" +
            std::to_string(P.Arg) + ">";
      break;
    }
  }
  return Out;
}

//===-- Body --------------------------------------------------------------===//

std::string Statement::str() const {
  struct Printer {
    std::string operator()(const AssignStmt &S) const {
      std::string Rhs = std::visit(
          [](const auto &Rv) -> std::string {
            using T = std::decay_t<decltype(Rv)>;
            if constexpr (std::is_same_v<T, UseRv>)
              return Rv.Src.str();
            else if constexpr (std::is_same_v<T, RefRv>)
              return std::string(Rv.Mutable ? "&mut " : "&") + Rv.Src.str();
            else {
              std::string Out = Rv.Adt + " {";
              for (std::size_t I = 0; I < Rv.Fields.size(); ++I)
                Out += (I ? ", " : " ") + Rv.Fields[I].first + ": " +
                       (Rv.Fields[I].second ? Rv.Fields[I].second->str()
                                            : std::string("const"));
              return Out + " }";
            }
          },
          S.Rv);
      return S.Dst.str() + " = " + Rhs;
    }
    std::string operator()(const CallStmt &S) const {
      std::string Out = S.Dst.str() + " = " + S.Callee + "(";
      for (std::size_t I = 0; I < S.Args.size(); ++I)
        Out += (I ? ", " : "") + S.Args[I].str();
      return Out + ")";
    }
    std::string operator()(const ReturnStmt &S) const {
      return S.Value ? "return " + S.Value->str() : std::string("return");
    }
  };
  return std::visit(Printer{}, Kind);
}

std::vector<unsigned> Body::reversePostorder() const {
  std::vector<unsigned> Post;
  if (Blocks.empty())
    return Post;
  std::vector<bool> Seen(Blocks.size(), false);
  // Iterative DFS; the second stack slot is the next successor to visit.
  std::vector<std::pair<unsigned, std::size_t>> Stack{{0, 0}};
  Seen[0] = true;
  while (!Stack.empty()) {
    auto &[Block, Next] = Stack.back();
    const auto &Succs = Blocks[Block].Successors;
    if (Next < Succs.size()) {
      unsigned S = Succs[Next++];
      if (!Seen[S]) {
        Seen[S] = true;
        Stack.emplace_back(S, 0);
      }
      continue;
    }
    Post.push_back(Block);
    Stack.pop_back();
  }
  std::reverse(Post.begin(), Post.end());
  return Post;
}

std::size_t Body::statementCount() const {
  std::size_t N = 0;
  for (const BasicBlock &B : Blocks)
    N += B.Statements.size();
  return N;
}

void Body::verify() const {
  for (std::size_t I = 0; I < Blocks.size(); ++I) {
    const BasicBlock &B = Blocks[I];
    for (unsigned S : B.Successors)
      if (S >= Blocks.size())
        throw ModelError("block " + std::to_string(I) +
                         " has invalid successor " + std::to_string(S));
    if (!B.Statements.empty() &&
        std::holds_alternative<ReturnStmt>(B.Statements.back().Kind) &&
        !B.Successors.empty())
      throw ModelError("block " + std::to_string(I) +
                       " returns but has successors");
  }
}

//===-- Functions ---------------------------------------------------------===//

std::string FunctionModel::qualifiedName() const {
  if (ImplOf)
    return ImplOf->StructName + "::" + Name;
  return Name;
}

std::vector<std::pair<PathRoot, SubjectType>> FunctionModel::arguments() const {
  std::vector<std::pair<PathRoot, SubjectType>> Out;
  if (Self && Self->Type)
    Out.emplace_back(PathRoot::self(), *Self->Type);
  for (std::size_t I = 0; I < Params.size(); ++I)
    Out.emplace_back(PathRoot::arg(static_cast<unsigned>(I), Params[I].Name),
                     Params[I].Type);
  return Out;
}

FunctionModel resolveSelf(const FunctionModel &Fn, const StructTable &Structs) {
  if (!Fn.ImplOf || !Fn.Self)
    return Fn;
  if (!Structs.contains(Fn.ImplOf->StructName))
    throw ModelError("impl of undeclared struct '" + Fn.ImplOf->StructName +
                     "'");
  FunctionModel Out = Fn;
  if (Out.Self->F == SelfParam::Form::Explicit)
    return Out;
  SubjectType SelfTy = SubjectType::adt(
      Fn.ImplOf->StructName, Fn.ImplOf->LifetimeArgs, Fn.ImplOf->TypeArgs);
  switch (Out.Self->F) {
  case SelfParam::Form::Value:
    Out.Self->Type = SelfTy;
    break;
  case SelfParam::Form::Ref:
    Out.Self->Type = SubjectType::sharedRef(Out.Self->RefLifetime, SelfTy);
    break;
  case SelfParam::Form::MutRef:
    Out.Self->Type = SubjectType::uniqueRef(Out.Self->RefLifetime, SelfTy);
    break;
  case SelfParam::Form::Explicit:
    break;
  }
  return Out;
}

const FunctionModel *
CrateModel::findFunction(const std::string &QualifiedName) const {
  for (const FunctionModel &Fn : Functions)
    if (Fn.qualifiedName() == QualifiedName)
      return &Fn;
  return nullptr;
}

std::optional<SubjectType>
typeOfPath(const ValuePath &Path,
           const std::vector<std::pair<PathRoot, SubjectType>> &Roots,
           const StructTable &Structs) {
  std::optional<SubjectType> Cur;
  for (const auto &[Root, Ty] : Roots)
    if (Root == Path.root())
      Cur = Ty;
  if (!Cur)
    return std::nullopt;
  for (const Projection &P : Path.projections()) {
    switch (P.K) {
    case Projection::Kind::Deref:
      if (!Cur->isRef() && !Cur->isRaw())
        return std::nullopt;
      Cur = Cur->inner();
      break;
    case Projection::Kind::Index:
      if (Cur->kind() == SubjectType::Kind::Adt && Cur->name() == "array" &&
          !Cur->typeArgs().empty()) {
        Cur = Cur->typeArgs()[0];
        break;
      }
      if (Cur->kind() != SubjectType::Kind::Slice)
        return std::nullopt;
      Cur = Cur->inner();
      break;
    case Projection::Kind::TypeArg:
      if (Cur->kind() != SubjectType::Kind::Adt ||
          P.Arg >= Cur->typeArgs().size())
        return std::nullopt;
      Cur = Cur->typeArgs()[P.Arg];
      break;
    case Projection::Kind::Field: {
      std::optional<SubjectType> Next;
      for (auto &[Name, Ty] : Structs.instantiateFields(*Cur))
        if (Name == P.Field)
          Next = Ty;
      if (!Next)
        return std::nullopt;
      Cur = std::move(Next);
      break;
    }
    }
  }
  return Cur;
}

} // namespace lifecheck
