//===- Printer.cpp - Render structs and signatures as source ----------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Each method is printed in an impl block of its own. Anonymous lifetimes
// print as `'_` in input position, which re-expands to the same numbering;
// an anonymous output lifetime equal to an input one prints elided.
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Frontend.h"

#include <algorithm>
#include <set>

namespace lifecheck {
namespace {

std::string joinComma(const std::vector<std::string> &Parts) {
  std::string Out;
  for (std::size_t I = 0; I < Parts.size(); ++I)
    Out += (I ? ", " : "") + Parts[I];
  return Out;
}

/// Renders \p T. Anonymous lifetimes become `'_` when \p Input, otherwise
/// they are elided (refs) or `'_` when not bound to an input.
std::string typeStr(const SubjectType &T, bool Input,
                    const std::set<Lifetime> &InputAnon) {
  using K = SubjectType::Kind;
  auto Lt = [&](const Lifetime &L) -> std::string {
    if (L.kind() != Lifetime::Kind::Anonymous)
      return L.str();
    if (Input || !InputAnon.count(L))
      return "'_";
    return "";
  };
  auto Rec = [&](const SubjectType &I) { return typeStr(I, Input, InputAnon); };
  switch (T.kind()) {
  case K::SharedRef:
  case K::UniqueRef: {
    std::string L = Lt(T.lifetime());
    return "&" + (L.empty() ? "" : L + " ") +
           (T.kind() == K::UniqueRef ? "mut " : "") + Rec(T.inner());
  }
  case K::RawShared:
    return "*const " + Rec(T.inner());
  case K::RawUnique:
    return "*mut " + Rec(T.inner());
  case K::Slice:
    return "[" + Rec(T.inner()) + "]";
  case K::Generic:
  case K::Prim:
    return T.name();
  case K::Adt: {
    if (T.name() == "tuple") {
      std::vector<std::string> Parts;
      for (const SubjectType &A : T.typeArgs())
        Parts.push_back(Rec(A));
      return "(" + joinComma(Parts) + (Parts.size() == 1 ? ",)" : ")");
    }
    if (T.name() == "array" && T.typeArgs().size() == 1)
      return "[" + Rec(T.typeArgs()[0]) + "; 0]";
    std::vector<std::string> Parts;
    bool AllElided = true;
    for (const Lifetime &L : T.lifetimeArgs()) {
      std::string S = Lt(L);
      AllElided &= S.empty();
      Parts.push_back(S.empty() ? "'_" : S);
    }
    // An elided output argument list is written by omitting the lifetimes.
    if (AllElided)
      Parts.clear();
    for (const SubjectType &A : T.typeArgs())
      Parts.push_back(Rec(A));
    return T.name() + (Parts.empty() ? "" : "<" + joinComma(Parts) + ">");
  }
  }
  return "?";
}

std::string boundsStr(std::span<const Lifetime> Bounds) {
  std::string Out;
  for (std::size_t I = 0; I < Bounds.size(); ++I)
    Out += (I ? " + " : "") + Bounds[I].str();
  return Out;
}

void collectGenerics(const SubjectType &T, std::vector<std::string> &Lts,
                     std::vector<std::string> &Tys) {
  for (const Lifetime &L : T.lifetimes())
    if (L.kind() == Lifetime::Kind::Named &&
        std::find(Lts.begin(), Lts.end(), L.name()) == Lts.end())
      Lts.push_back(L.name());
  std::vector<SubjectType> Work{T};
  while (!Work.empty()) {
    SubjectType Cur = Work.back();
    Work.pop_back();
    if (Cur.kind() == SubjectType::Kind::Generic) {
      std::string Decl = Cur.name();
      if (!Cur.lifetimeBounds().empty())
        Decl += ": " + boundsStr(Cur.lifetimeBounds());
      if (std::find(Tys.begin(), Tys.end(), Decl) == Tys.end())
        Tys.push_back(Decl);
      continue;
    }
    if (Cur.isRef() || Cur.isRaw() || Cur.kind() == SubjectType::Kind::Slice)
      Work.push_back(Cur.inner());
    for (const SubjectType &A : Cur.typeArgs())
      Work.push_back(A);
  }
}

void printStruct(const StructDef &D, std::string &Out) {
  std::vector<std::string> Params;
  for (const std::string &L : D.LifetimeParams)
    Params.push_back("'" + L);
  for (std::size_t I = 0; I < D.TypeParams.size(); ++I) {
    std::string P = D.TypeParams[I];
    if (I < D.TypeParamBounds.size() && !D.TypeParamBounds[I].empty())
      P += ": " + boundsStr(D.TypeParamBounds[I]);
    Params.push_back(P);
  }
  std::string Header =
      D.Name + (Params.empty() ? "" : "<" + joinComma(Params) + ">");
  if (D.Opaque) {
    Out += "enum " + Header + " {}\n";
    return;
  }
  Out += "struct " + Header + " {\n";
  for (const auto &[Name, Ty] : D.Fields)
    Out += "    " + Name + ": " + typeStr(Ty, true, {}) + ",\n";
  Out += "}\n";
}

std::string selfStr(const SelfParam &S, const std::set<Lifetime> &InputAnon) {
  auto Lt = [&](const Lifetime &L) -> std::string {
    if (L.kind() == Lifetime::Kind::Elided)
      return "";
    return (L.kind() == Lifetime::Kind::Anonymous ? std::string("'_")
                                                  : L.str()) +
           " ";
  };
  switch (S.F) {
  case SelfParam::Form::Value:
    return "self";
  case SelfParam::Form::Ref:
    return "&" + Lt(S.RefLifetime) + "self";
  case SelfParam::Form::MutRef:
    return "&" + Lt(S.RefLifetime) + "mut self";
  case SelfParam::Form::Explicit:
    return "self: " + typeStr(*S.Type, true, InputAnon);
  }
  return "self";
}

void printFunction(const FunctionModel &F, std::string &Out) {
  std::set<Lifetime> InputAnon;
  auto NoteInputs = [&](const SubjectType &T) {
    for (const Lifetime &L : T.lifetimes())
      if (L.kind() == Lifetime::Kind::Anonymous)
        InputAnon.insert(L);
  };
  if (F.Self && F.Self->Type)
    NoteInputs(*F.Self->Type);
  for (const Param &P : F.Params)
    NoteInputs(P.Type);

  std::string Indent;
  if (F.ImplOf) {
    SubjectType Target =
        SubjectType::adt(F.ImplOf->StructName, F.ImplOf->LifetimeArgs,
                         F.ImplOf->TypeArgs);
    std::vector<std::string> Lts, Tys;
    collectGenerics(Target, Lts, Tys);
    std::vector<std::string> Params;
    for (const std::string &L : Lts)
      Params.push_back("'" + L);
    for (const std::string &T : Tys)
      Params.push_back(T);
    Out += "impl" + (Params.empty() ? "" : "<" + joinComma(Params) + ">") +
           " " + (F.ImplOf->Trait ? *F.ImplOf->Trait + " for " : "") +
           typeStr(Target, true, {}) + " {\n";
    Indent = "    ";
  }

  std::vector<std::string> Generics;
  for (const std::string &L : F.LifetimeParams)
    Generics.push_back("'" + L);
  for (const std::string &T : F.TypeParams)
    Generics.push_back(T);

  std::vector<std::string> Args;
  if (F.Self)
    Args.push_back(selfStr(*F.Self, InputAnon));
  for (const Param &P : F.Params)
    Args.push_back(P.Name + ": " + typeStr(P.Type, true, InputAnon));

  Out += Indent + "fn " + F.Name +
         (Generics.empty() ? "" : "<" + joinComma(Generics) + ">") + "(" +
         joinComma(Args) + ")";
  if (F.ReturnType)
    Out += " -> " + typeStr(*F.ReturnType, false, InputAnon);

  std::vector<std::string> Where;
  for (const auto &[Long, Short] : F.LifetimeBounds)
    Where.push_back(Long.str() + ": " + Short.str());
  for (const auto &[Name, L] : F.WhereBounds)
    Where.push_back(Name + ": " + L.str());
  if (!Where.empty())
    Out += " where " + joinComma(Where);
  Out += ";\n";
  if (F.ImplOf)
    Out += "}\n";
}

} // namespace

std::string printCrate(const CrateModel &Crate) {
  std::string Out;
  for (const auto &[Name, Def] : Crate.Structs)
    printStruct(Def, Out);
  for (const FunctionModel &F : Crate.Functions)
    printFunction(F, Out);
  return Out;
}

} // namespace lifecheck
