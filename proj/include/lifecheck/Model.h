//===- Model.h - Types, lifetimes and body IR of the analyzed language ---===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The in-memory model shared by every stage: lifetimes, the subject-language
// type grammar, struct definitions, function signatures and the basic-block
// IR lowered from function bodies. All values are immutable once built.
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_MODEL_H
#define LIFECHECK_MODEL_H

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lifecheck {

/// Raised for model-level inconsistencies, e.g. an impl naming an undeclared
/// struct.
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Lifetime {
public:
  /// Elided and Wildcard only exist between parsing and elision expansion.
  enum class Kind { Named, Static, Anonymous, Elided, Wildcard };

  static Lifetime named(std::string Name);
  static Lifetime staticLifetime() { return Lifetime(Kind::Static, "", 0); }
  static Lifetime anonymous(unsigned Id) {
    return Lifetime(Kind::Anonymous, "", Id);
  }
  static Lifetime elided() { return Lifetime(Kind::Elided, "", 0); }
  static Lifetime wildcard() { return Lifetime(Kind::Wildcard, "", 0); }

  Kind kind() const { return K; }
  bool isStatic() const { return K == Kind::Static; }
  bool isUnbound() const { return K == Kind::Elided || K == Kind::Wildcard; }
  const std::string &name() const { return Name; }
  unsigned anonId() const { return Id; }

  /// 'a, 'static, '_1 (anonymous) or '_ (unexpanded).
  std::string str() const;

  auto operator<=>(const Lifetime &) const = default;
  bool operator==(const Lifetime &) const = default;

private:
  Lifetime(Kind K, std::string Name, unsigned Id)
      : K(K), Name(std::move(Name)), Id(Id) {}

  Kind K;
  std::string Name;
  unsigned Id;
};

/// A type of the analyzed language. Cheap to copy; the node is shared.
class SubjectType {
public:
  enum class Kind {
    SharedRef,
    UniqueRef,
    RawShared,
    RawUnique,
    Adt,
    Slice,
    Generic,
    Prim
  };

  static SubjectType sharedRef(Lifetime L, SubjectType Inner);
  static SubjectType uniqueRef(Lifetime L, SubjectType Inner);
  static SubjectType rawShared(SubjectType Inner);
  static SubjectType rawUnique(SubjectType Inner);
  static SubjectType adt(std::string Name, std::vector<Lifetime> LifetimeArgs = {},
                         std::vector<SubjectType> TypeArgs = {});
  static SubjectType slice(SubjectType Element);
  static SubjectType generic(std::string Name, std::vector<Lifetime> Bounds = {});
  static SubjectType prim(std::string Name);

  Kind kind() const;
  bool isRef() const {
    return kind() == Kind::SharedRef || kind() == Kind::UniqueRef;
  }
  bool isRaw() const {
    return kind() == Kind::RawShared || kind() == Kind::RawUnique;
  }
  /// True for `&mut T` and `*mut T`.
  bool isMutablePointer() const {
    return kind() == Kind::UniqueRef || kind() == Kind::RawUnique;
  }

  /// Reference lifetime. Only valid for SharedRef/UniqueRef.
  const Lifetime &lifetime() const;
  /// Pointee or slice element. Valid for refs, raws and slices.
  const SubjectType &inner() const;
  /// Adt, Generic or Prim name.
  const std::string &name() const;
  /// Adt lifetime arguments.
  std::span<const Lifetime> lifetimeArgs() const;
  /// Generic lifetime bounds (`F: 'c`).
  std::span<const Lifetime> lifetimeBounds() const;
  std::span<const SubjectType> typeArgs() const;

  /// Rebuilds the type with every lifetime passed through \p F.
  template <typename Fn> SubjectType mapLifetimes(Fn &&F) const;

  /// Every lifetime occurring in the type, in pre-order.
  std::vector<Lifetime> lifetimes() const;

  /// Full structural equality, lifetimes included.
  bool operator==(const SubjectType &Other) const;

  /// Source-like rendering: `&'a mut Foo<'a, T>`, `*const u8`, `[T]`.
  std::string str() const;

private:
  struct Node;
  explicit SubjectType(std::shared_ptr<const Node> N) : N(std::move(N)) {}
  static SubjectType make(Kind K, std::string Name, std::vector<Lifetime> Lts,
                          std::vector<SubjectType> Tys);

  std::shared_ptr<const Node> N;
};

struct SubjectType::Node {
  Kind K;
  std::string Name;
  std::vector<Lifetime> Lifetimes;
  std::vector<SubjectType> Types;
};

template <typename Fn> SubjectType SubjectType::mapLifetimes(Fn &&F) const {
  std::vector<Lifetime> Lts;
  Lts.reserve(N->Lifetimes.size());
  for (const Lifetime &L : N->Lifetimes)
    Lts.push_back(F(L));
  std::vector<SubjectType> Tys;
  Tys.reserve(N->Types.size());
  for (const SubjectType &T : N->Types)
    Tys.push_back(T.mapLifetimes(F));
  return make(N->K, N->Name, std::move(Lts), std::move(Tys));
}

/// Controls how loosely type_equal matches.
struct MatchPolicy {
  /// A Generic carrying at least one lifetime bound matches any type.
  bool GenericWildcard = false;
};

/// Structural equality with lifetimes erased; lifetimes are compared
/// separately by the checks that use this.
bool typeEqual(const SubjectType &A, const SubjectType &B,
               MatchPolicy Policy = {});

struct StructDef {
  std::string Name;
  std::vector<std::string> LifetimeParams;
  std::vector<std::string> TypeParams;
  /// Lifetime bounds per type parameter (`K: 'a`), parallel to TypeParams.
  std::vector<std::vector<Lifetime>> TypeParamBounds;
  std::vector<std::pair<std::string, SubjectType>> Fields;
  bool Opaque = false;
  unsigned Line = 0;

  const SubjectType *field(const std::string &FieldName) const;
};

class StructTable {
public:
  void add(StructDef Def);
  const StructDef *find(const std::string &Name) const;
  bool contains(const std::string &Name) const { return find(Name); }
  std::size_t size() const { return Defs.size(); }
  auto begin() const { return Defs.begin(); }
  auto end() const { return Defs.end(); }

  /// Field types of \p Adt with the struct's parameters replaced by the
  /// Adt's arguments. Empty for opaque or unknown structs.
  std::vector<std::pair<std::string, SubjectType>>
  instantiateFields(const SubjectType &Adt) const;

private:
  std::map<std::string, StructDef> Defs;
};

struct PathRoot {
  enum class Kind { Arg, Self, Ret, Local };
  Kind K = Kind::Local;
  unsigned Index = 0;
  std::string Name;

  static PathRoot arg(unsigned Index, std::string Name) {
    return {Kind::Arg, Index, std::move(Name)};
  }
  static PathRoot self() { return {Kind::Self, 0, "self"}; }
  static PathRoot ret() { return {Kind::Ret, 0, "ret"}; }
  static PathRoot local(std::string Name) {
    return {Kind::Local, 0, std::move(Name)};
  }

  auto operator<=>(const PathRoot &) const = default;
  bool operator==(const PathRoot &) const = default;
};

struct Projection {
  /// Index selects a slice element; TypeArg selects the owned content named
  /// by a type argument of an opaque Adt (`RefCell<T>` holds a T).
  enum class Kind { Deref, Field, Index, TypeArg };
  Kind K = Kind::Deref;
  std::string Field;
  unsigned Arg = 0;

  static Projection deref() { return {Kind::Deref, "", 0}; }
  static Projection field(std::string Name) {
    return {Kind::Field, std::move(Name), 0};
  }
  static Projection index() { return {Kind::Index, "", 0}; }
  static Projection typeArg(unsigned I) { return {Kind::TypeArg, "", I}; }

  auto operator<=>(const Projection &) const = default;
  bool operator==(const Projection &) const = default;
};

/// A root variable followed by dereference and field projections, printed
/// with explicit parentheses: `(*arg2).y`, `*(ret.x)`.
class ValuePath {
public:
  ValuePath() = default;
  explicit ValuePath(PathRoot Root) : Root(std::move(Root)) {}

  const PathRoot &root() const { return Root; }
  const std::vector<Projection> &projections() const { return Projs; }
  std::size_t depth() const { return Projs.size(); }

  ValuePath deref() const { return with(Projection::deref()); }
  ValuePath field(std::string Name) const {
    return with(Projection::field(std::move(Name)));
  }
  ValuePath index() const { return with(Projection::index()); }
  ValuePath typeArg(unsigned I) const { return with(Projection::typeArg(I)); }
  ValuePath with(Projection P) const;

  /// True if \p Other is this path or extends it.
  bool isPrefixOf(const ValuePath &Other) const;

  std::string str() const;

  auto operator<=>(const ValuePath &) const = default;
  bool operator==(const ValuePath &) const = default;

private:
  PathRoot Root;
  std::vector<Projection> Projs;
};

using Place = ValuePath;

//===-- Body IR -----------------------------------------------------------===//

struct UseRv {
  Place Src;
};
struct RefRv {
  Place Src;
  bool Mutable = false;
};
struct AggregateRv {
  std::string Adt;
  /// nullopt marks a constant operand.
  std::vector<std::pair<std::string, std::optional<Place>>> Fields;
};
using Rvalue = std::variant<UseRv, RefRv, AggregateRv>;

struct AssignStmt {
  Place Dst;
  Rvalue Rv;
};
struct CallStmt {
  Place Dst;
  std::string Callee;
  std::vector<Place> Args;
};
struct ReturnStmt {
  std::optional<Place> Value;
};

struct Statement {
  std::variant<AssignStmt, CallStmt, ReturnStmt> Kind;
  unsigned Line = 0;

  std::string str() const;
};

struct BasicBlock {
  std::vector<Statement> Statements;
  std::vector<unsigned> Successors;
};

struct Body {
  std::vector<BasicBlock> Blocks;

  /// Block indices reachable from the entry, in reverse postorder.
  std::vector<unsigned> reversePostorder() const;
  std::size_t statementCount() const;
  /// Throws ModelError if a successor index is out of range or a block ending
  /// in ReturnStmt has successors.
  void verify() const;
};

//===-- Functions ---------------------------------------------------------===//

struct ImplRef {
  std::string StructName;
  std::vector<Lifetime> LifetimeArgs;
  std::vector<SubjectType> TypeArgs;
  /// Set for `impl Trait for Type`.
  std::optional<std::string> Trait;
};

struct SelfParam {
  enum class Form { Value, Ref, MutRef, Explicit };
  Form F = Form::Ref;
  Lifetime RefLifetime = Lifetime::elided();
  /// Set for Form::Explicit at parse time and for every form after
  /// resolveSelf.
  std::optional<SubjectType> Type;
};

struct Param {
  std::string Name;
  SubjectType Type;
};

struct SourceSpan {
  std::string File;
  unsigned Line = 0;
  unsigned EndLine = 0;
};

struct FunctionModel {
  std::string Name;
  std::optional<ImplRef> ImplOf;
  std::vector<std::string> LifetimeParams;
  std::vector<std::string> TypeParams;
  std::optional<SelfParam> Self;
  std::vector<Param> Params;
  std::optional<SubjectType> ReturnType;
  /// `F: 'c` bounds, also folded into the Generic types themselves.
  std::vector<std::pair<std::string, Lifetime>> WhereBounds;
  /// Declared `'a: 'b` relations (longer, shorter).
  std::vector<std::pair<Lifetime, Lifetime>> LifetimeBounds;
  std::optional<Body> FnBody;
  /// Why the body is absent, when it is.
  std::string BodyDiagnostic;
  SourceSpan Span;

  /// `Impl::name` for methods, `name` for free functions.
  std::string qualifiedName() const;
  /// Self and the parameters, in argument order, with their path roots.
  std::vector<std::pair<PathRoot, SubjectType>> arguments() const;
};

/// Expands `self`, `&self`, `&mut self` into the impl's struct type.
/// Free functions come back unchanged.
FunctionModel resolveSelf(const FunctionModel &Fn, const StructTable &Structs);

struct CrateModel {
  StructTable Structs;
  std::vector<FunctionModel> Functions;
  std::vector<std::string> Diagnostics;

  const FunctionModel *findFunction(const std::string &QualifiedName) const;
};

/// Type of \p Path given the types of the function's roots, or nullopt when a
/// projection does not apply to the type it meets.
std::optional<SubjectType>
typeOfPath(const ValuePath &Path,
           const std::vector<std::pair<PathRoot, SubjectType>> &Roots,
           const StructTable &Structs);

} // namespace lifecheck

#endif // LIFECHECK_MODEL_H
