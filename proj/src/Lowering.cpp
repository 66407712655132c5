//===- Lowering.cpp - Body syntax to basic-block IR -------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Expressions are lowered either "into" a destination place, which lets a
// struct literal field receive `&mut (*arg2).y` directly, or to an operand
// place, introducing a temporary when the expression is not already a place.
// Constants lower to nothing; where a call needs an operand for one, a fresh
// local that is never assigned stands in for it.
//
// Types are tracked on a best-effort basis, only to decide auto-deref for
// field access and auto-ref for method receivers.
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Frontend.h"

#include <map>

namespace lifecheck {
namespace {

using ast::Expr;

struct Operand {
  std::optional<Place> P; // nullopt: a constant
  std::optional<SubjectType> Ty;
};

struct LoopFrame {
  unsigned Header;
  unsigned Exit;
  std::optional<Place> Result;
};

class Lowerer {
public:
  Lowerer(const FunctionModel &Sig, const StructTable &Structs)
      : Structs(Structs) {
    Roots = Sig.arguments();
    Scopes.emplace_back();
    for (const auto &[Root, Ty] : Roots)
      Scopes.back()[Root.Name] = ValuePath(Root);
  }

  Body run(const ast::Block &B) {
    Cur = newBlock();
    Operand Tail = lowerBlock(B);
    emit(ReturnStmt{Tail.P}, LastLine);
    Result.verify();
    return std::move(Result);
  }

private:
  //===-- Blocks and statements -------------------------------------------===//

  unsigned newBlock() {
    Result.Blocks.emplace_back();
    return static_cast<unsigned>(Result.Blocks.size() - 1);
  }

  void emit(std::variant<AssignStmt, CallStmt, ReturnStmt> S, unsigned Line) {
    Result.Blocks[Cur].Statements.push_back(Statement{std::move(S), Line});
  }

  void jump(unsigned To) { Result.Blocks[Cur].Successors.push_back(To); }

  /// Ends the current block and continues in a fresh unreachable one.
  void terminate() { Cur = newBlock(); }

  Place freshLocal(const std::string &Hint,
                   std::optional<SubjectType> Ty = std::nullopt) {
    std::string Name = Hint + std::to_string(++TmpCounter);
    PathRoot Root = PathRoot::local("_" + Name);
    if (Ty)
      Roots.emplace_back(Root, *Ty);
    return ValuePath(Root);
  }

  Place declareLocal(const std::string &Name, std::optional<SubjectType> Ty) {
    unsigned &Count = LocalCounts[Name];
    std::string Unique = Count++ ? Name + "#" + std::to_string(Count) : Name;
    PathRoot Root = PathRoot::local(Unique);
    if (Ty)
      Roots.emplace_back(Root, *Ty);
    Scopes.back()[Name] = ValuePath(Root);
    return ValuePath(Root);
  }

  std::optional<Place> lookup(const std::string &Name) const {
    for (auto It = Scopes.rbegin(); It != Scopes.rend(); ++It) {
      auto Found = It->find(Name);
      if (Found != It->end())
        return Found->second;
    }
    return std::nullopt;
  }

  std::optional<SubjectType> typeOf(const Place &P) const {
    return typeOfPath(P, Roots, Structs);
  }

  void setType(const Place &P, const std::optional<SubjectType> &Ty) {
    if (Ty && P.projections().empty() && !typeOf(P))
      Roots.emplace_back(P.root(), *Ty);
  }

  Operand lowerBlock(const ast::Block &B) {
    Scopes.emplace_back();
    for (const ast::Stmt &S : B.Stmts) {
      LastLine = S.Line;
      if (S.K == ast::Stmt::Kind::Let) {
        lowerLet(S);
        continue;
      }
      lowerEffect(*S.Value);
    }
    Operand Out;
    if (B.Tail)
      Out = lowerOperand(*B.Tail);
    Scopes.pop_back();
    return Out;
  }

  void lowerLet(const ast::Stmt &S) {
    if (S.Name == "_") {
      if (S.Value)
        lowerEffect(*S.Value);
      return;
    }
    // The initializer is evaluated before the new name comes into scope.
    if (!S.Value) {
      declareLocal(S.Name, S.DeclaredType);
      return;
    }
    std::optional<SubjectType> Ty = S.DeclaredType;
    if (!Ty)
      Ty = exprType(*S.Value);
    Place Tmp = freshLocal("let", Ty);
    bool Assigned = lowerInto(Tmp, *S.Value);
    Place Dst = declareLocal(S.Name, Ty);
    if (Assigned)
      // Re-target the statement we just emitted instead of copying through
      // the temporary when it is the last one; keeps `let p = &x` as a single
      // Assign(p, &x).
      retarget(Tmp, Dst);
  }

  /// Replaces the root \p From with \p To in the statements emitted since
  /// the temporary was created. Temporaries are unique, so a root rename is
  /// sound.
  void retarget(const Place &From, const Place &To) {
    for (BasicBlock &B : Result.Blocks)
      for (Statement &S : B.Statements)
        std::visit([&](auto &St) { renameRoot(St, From.root(), To.root()); },
                   S.Kind);
    for (auto &[Root, Ty] : Roots)
      if (Root == From.root())
        Root = To.root();
  }

  static void renamePlace(Place &P, const PathRoot &From, const PathRoot &To) {
    if (P.root() != From)
      return;
    Place Out(To);
    for (const Projection &Pr : P.projections())
      Out = Out.with(Pr);
    P = Out;
  }
  static void renameRoot(AssignStmt &S, const PathRoot &From,
                         const PathRoot &To) {
    renamePlace(S.Dst, From, To);
    std::visit(
        [&](auto &Rv) {
          using T = std::decay_t<decltype(Rv)>;
          if constexpr (std::is_same_v<T, AggregateRv>) {
            for (auto &F : Rv.Fields)
              if (F.second)
                renamePlace(*F.second, From, To);
          } else {
            renamePlace(Rv.Src, From, To);
          }
        },
        S.Rv);
  }
  static void renameRoot(CallStmt &S, const PathRoot &From, const PathRoot &To) {
    renamePlace(S.Dst, From, To);
    for (Place &A : S.Args)
      renamePlace(A, From, To);
  }
  static void renameRoot(ReturnStmt &S, const PathRoot &From,
                         const PathRoot &To) {
    if (S.Value)
      renamePlace(*S.Value, From, To);
  }

  //===-- Expressions -----------------------------------------------------===//

  [[noreturn]] static void unsupported(const Expr &E) {
    throw LoweringError(E.Line, "unsupported construct: " + E.Name);
  }

  /// Best-effort static type of \p E without emitting anything.
  std::optional<SubjectType> exprType(const Expr &E) const {
    switch (E.K) {
    case Expr::Kind::Path:
    case Expr::Kind::Field:
    case Expr::Kind::Deref:
    case Expr::Kind::Index:
      if (auto P = placePreview(E))
        return typeOf(*P);
      return std::nullopt;
    case Expr::Kind::Ref: {
      auto Inner = exprType(*E.Lhs);
      if (!Inner)
        return std::nullopt;
      return E.Mutable ? SubjectType::uniqueRef(Lifetime::elided(), *Inner)
                       : SubjectType::sharedRef(Lifetime::elided(), *Inner);
    }
    case Expr::Kind::StructLit:
      return structLitType(E.Name);
    default:
      return std::nullopt;
    }
  }

  SubjectType structLitType(const std::string &Name) const {
    const StructDef *Def = Structs.find(Name);
    if (!Def)
      return SubjectType::adt(Name);
    std::vector<Lifetime> Lts;
    for (const std::string &L : Def->LifetimeParams)
      Lts.push_back(Lifetime::named(L));
    std::vector<SubjectType> Tys;
    for (const std::string &T : Def->TypeParams)
      Tys.push_back(SubjectType::generic(T));
    return SubjectType::adt(Name, std::move(Lts), std::move(Tys));
  }

  /// The place a place expression denotes, if it can be computed without
  /// emitting statements.
  std::optional<Place> placePreview(const Expr &E) const {
    switch (E.K) {
    case Expr::Kind::Path:
      return lookup(E.Name);
    case Expr::Kind::Deref:
      if (auto P = placePreview(*E.Lhs))
        return P->deref();
      return std::nullopt;
    case Expr::Kind::Field:
      if (auto P = placePreview(*E.Lhs))
        return autoDeref(*P).field(E.Name);
      return std::nullopt;
    case Expr::Kind::Index:
      if (auto P = placePreview(*E.Lhs)) {
        Place Base = autoDeref(*P);
        if (isIndexable(Base))
          return Base.index();
      }
      return std::nullopt;
    default:
      return std::nullopt;
    }
  }

  Place autoDeref(Place P) const {
    for (unsigned Guard = 0; Guard < 8; ++Guard) {
      auto Ty = typeOf(P);
      if (!Ty || !Ty->isRef())
        return P;
      P = P.deref();
    }
    return P;
  }

  bool isIndexable(const Place &P) const {
    auto Ty = typeOf(P);
    return Ty && (Ty->kind() == SubjectType::Kind::Slice ||
                  (Ty->kind() == SubjectType::Kind::Adt && Ty->name() == "array"));
  }

  static bool isPlaceExpr(const Expr &E) {
    switch (E.K) {
    case Expr::Kind::Path:
    case Expr::Kind::Deref:
    case Expr::Kind::Field:
    case Expr::Kind::Index:
      return true;
    default:
      return false;
    }
  }

  /// Lowers a place expression, emitting whatever its sub-expressions need.
  Place lowerPlace(const Expr &E) {
    switch (E.K) {
    case Expr::Kind::Path:
      if (auto P = lookup(E.Name))
        return *P;
      // A constant or unit value used as a place.
      return freshLocal("const");
    case Expr::Kind::Deref:
      return lowerPlace(*E.Lhs).deref();
    case Expr::Kind::Field:
      return autoDeref(placeOf(*E.Lhs)).field(E.Name);
    case Expr::Kind::Index: {
      Place Base = autoDeref(placeOf(*E.Lhs));
      lowerEffect(*E.Rhs);
      if (isIndexable(Base))
        return Base.index();
      // `a[i]` on a container is `*Index::index(&a, i)`.
      Place Ref = freshLocal("ref");
      emit(AssignStmt{Ref, RefRv{Base, false}}, E.Line);
      Place Out = freshLocal("idx");
      emit(CallStmt{Out, "index", {Ref}}, E.Line);
      return Out.deref();
    }
    default:
      return placeOf(E);
    }
  }

  /// A place holding the value of \p E; constants get an unassigned local.
  Place placeOf(const Expr &E) {
    if (isPlaceExpr(E))
      return lowerPlace(E);
    Operand O = lowerOperand(E);
    return O.P ? *O.P : freshLocal("const");
  }

  Operand lowerOperand(const Expr &E) {
    if (isPlaceExpr(E)) {
      if (E.K == Expr::Kind::Path && !lookup(E.Name))
        return {}; // constant, unit struct, enum variant
      Place P = lowerPlace(E);
      return {P, typeOf(P)};
    }
    switch (E.K) {
    case Expr::Kind::Literal:
      return {};
    case Expr::Kind::Cast:
      return lowerOperand(*E.Lhs);
    case Expr::Kind::Binary:
    case Expr::Kind::Unary:
      lowerEffect(*E.Lhs);
      if (E.Rhs)
        lowerEffect(*E.Rhs);
      return {};
    case Expr::Kind::Block: {
      Operand O = lowerBlock(*E.Body);
      return O;
    }
    default: {
      std::optional<SubjectType> Ty = exprType(E);
      Place Tmp = freshLocal("tmp", Ty);
      lowerInto(Tmp, E);
      return {Tmp, Ty};
    }
    }
  }

  /// Evaluates \p E for its effects only.
  void lowerEffect(const Expr &E) {
    switch (E.K) {
    case Expr::Kind::Literal:
    case Expr::Kind::Path:
      return;
    default:
      lowerInto(std::nullopt, E);
    }
  }

  /// Lowers \p E storing its value into \p Dst (if set). Returns false when
  /// nothing was written, e.g. for constants.
  bool lowerInto(const std::optional<Place> &Dst, const Expr &E) {
    LastLine = E.Line;
    switch (E.K) {
    case Expr::Kind::Literal:
      return false;
    case Expr::Kind::Path:
    case Expr::Kind::Deref:
    case Expr::Kind::Field:
    case Expr::Kind::Index: {
      Operand O = lowerOperand(E);
      if (!O.P || !Dst)
        return false;
      emit(AssignStmt{*Dst, UseRv{*O.P}}, E.Line);
      return true;
    }
    case Expr::Kind::Cast:
      return lowerInto(Dst, *E.Lhs);
    case Expr::Kind::Ref: {
      Place Src = placeOf(*E.Lhs);
      if (!Dst)
        return false;
      emit(AssignStmt{*Dst, RefRv{Src, E.Mutable}}, E.Line);
      return true;
    }
    case Expr::Kind::Call: {
      std::vector<Place> Args;
      for (const auto &A : E.Args)
        Args.push_back(placeOf(*A));
      emit(CallStmt{Dst ? *Dst : freshLocal("unused"), E.Name, Args}, E.Line);
      return Dst.has_value();
    }
    case Expr::Kind::MethodCall: {
      std::vector<Place> Args;
      Args.push_back(receiver(*E.Lhs));
      for (const auto &A : E.Args)
        Args.push_back(placeOf(*A));
      emit(CallStmt{Dst ? *Dst : freshLocal("unused"), E.Name, Args}, E.Line);
      return Dst.has_value();
    }
    case Expr::Kind::StructLit: {
      Place Tmp = freshLocal("tmp", structLitType(E.Name));
      if (E.Lhs) {
        Operand Base = lowerOperand(*E.Lhs);
        if (Base.P)
          emit(AssignStmt{Tmp, UseRv{*Base.P}}, E.Line);
      }
      for (const auto &[Field, Value] : E.FieldInits)
        lowerInto(Tmp.field(Field), *Value);
      if (!Dst)
        return false;
      emit(AssignStmt{*Dst, UseRv{Tmp}}, E.Line);
      return true;
    }
    case Expr::Kind::Tuple: {
      if (E.Args.empty())
        return false;
      bool Any = false;
      for (std::size_t I = 0; I < E.Args.size(); ++I) {
        std::optional<Place> Field;
        if (Dst)
          Field = Dst->field(std::to_string(I));
        Any |= lowerInto(Field, *E.Args[I]);
      }
      return Any && Dst;
    }
    case Expr::Kind::Block: {
      Operand O = lowerBlock(*E.Body);
      if (!O.P || !Dst)
        return false;
      emit(AssignStmt{*Dst, UseRv{*O.P}}, E.Line);
      return true;
    }
    case Expr::Kind::If:
      return lowerIf(Dst, E);
    case Expr::Kind::Loop:
      return lowerLoop(Dst, E);
    case Expr::Kind::While:
      lowerWhile(E);
      return false;
    case Expr::Kind::Break: {
      if (Loops.empty())
        throw LoweringError(E.Line, "break outside of a loop");
      LoopFrame &L = Loops.back();
      if (E.Lhs)
        lowerInto(L.Result, *E.Lhs);
      jump(L.Exit);
      terminate();
      return false;
    }
    case Expr::Kind::Continue:
      if (Loops.empty())
        throw LoweringError(E.Line, "continue outside of a loop");
      jump(Loops.back().Header);
      terminate();
      return false;
    case Expr::Kind::Return: {
      std::optional<Place> V;
      if (E.Lhs)
        V = lowerOperand(*E.Lhs).P;
      emit(ReturnStmt{V}, E.Line);
      terminate();
      return false;
    }
    case Expr::Kind::Assign: {
      if (E.Lhs->K == Expr::Kind::Path && E.Lhs->Name == "_") {
        lowerEffect(*E.Rhs);
        return false;
      }
      // Rust evaluates the right-hand side first.
      std::optional<SubjectType> Ty = exprType(*E.Rhs);
      Place Tmp = freshLocal("tmp", Ty);
      bool Wrote = lowerInto(Tmp, *E.Rhs);
      Place Target = lowerPlace(*E.Lhs);
      if (Wrote)
        emit(AssignStmt{Target, UseRv{Tmp}}, E.Line);
      return false;
    }
    case Expr::Kind::CompoundAssign:
      lowerEffect(*E.Rhs);
      lowerPlace(*E.Lhs);
      return false;
    case Expr::Kind::Binary:
    case Expr::Kind::Unary:
      lowerEffect(*E.Lhs);
      if (E.Rhs)
        lowerEffect(*E.Rhs);
      return false;
    case Expr::Kind::Unsupported:
      unsupported(E);
    }
    return false;
  }

  /// Method receivers are borrowed unless they already are pointers.
  Place receiver(const Expr &Recv) {
    if (Recv.K == Expr::Kind::Path && Recv.Name == "self")
      if (auto P = lookup("self"))
        if (auto Ty = typeOf(*P); Ty && (Ty->isRef() || Ty->isRaw()))
          return *P;
    Place P = placeOf(Recv);
    auto Ty = typeOf(P);
    if (Ty && (Ty->isRef() || Ty->isRaw()))
      return P;
    Place Ref = freshLocal("ref");
    emit(AssignStmt{Ref, RefRv{P, false}}, Recv.Line);
    return Ref;
  }

  bool lowerIf(const std::optional<Place> &Dst, const Expr &E) {
    lowerEffect(*E.Lhs);
    unsigned Then = newBlock();
    unsigned Join = newBlock();
    unsigned Else = E.Else ? newBlock() : Join;
    jump(Then);
    jump(Else);

    bool Wrote = false;
    Cur = Then;
    Operand T = lowerBlock(*E.Body);
    if (Dst && T.P) {
      emit(AssignStmt{*Dst, UseRv{*T.P}}, E.Line);
      Wrote = true;
    }
    jump(Join);
    if (E.Else) {
      Cur = Else;
      Wrote |= lowerInto(Dst, *E.Else);
      jump(Join);
    }
    Cur = Join;
    return Wrote;
  }

  bool lowerLoop(const std::optional<Place> &Dst, const Expr &E) {
    unsigned Header = newBlock();
    unsigned Exit = newBlock();
    jump(Header);
    Cur = Header;
    Loops.push_back({Header, Exit, Dst});
    lowerBlock(*E.Body);
    jump(Header);
    Loops.pop_back();
    Cur = Exit;
    return Dst.has_value();
  }

  void lowerWhile(const Expr &E) {
    unsigned Header = newBlock();
    unsigned BodyBlock = newBlock();
    unsigned Exit = newBlock();
    jump(Header);
    Cur = Header;
    lowerEffect(*E.Lhs);
    jump(BodyBlock);
    jump(Exit);
    Cur = BodyBlock;
    Loops.push_back({Header, Exit, std::nullopt});
    lowerBlock(*E.Body);
    jump(Header);
    Loops.pop_back();
    Cur = Exit;
  }

  const StructTable &Structs;
  std::vector<std::pair<PathRoot, SubjectType>> Roots;
  std::vector<std::map<std::string, Place>> Scopes;
  std::map<std::string, unsigned> LocalCounts;
  std::vector<LoopFrame> Loops;
  Body Result;
  unsigned Cur = 0;
  unsigned TmpCounter = 0;
  unsigned LastLine = 0;
};

} // namespace

Body lowerBody(const ast::Block &B, const FunctionModel &Signature,
               const StructTable &Structs) {
  return Lowerer(Signature, Structs).run(B);
}

} // namespace lifecheck
