//===- Parser.cpp - Items, signatures and body syntax ----------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A recursive-descent parser over the token stream. Items we do not model
// (traits, uses, consts, macros_rules) are skipped with balanced-delimiter
// scanning. Bodies are parsed into the ast:: tree; a body that fails to parse
// is dropped with a diagnostic while the signature is kept.
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Frontend.h"

#include <algorithm>
#include <set>

namespace lifecheck {
namespace {

using ast::Expr;
using ast::ExprPtr;

const std::set<std::string> &primitiveNames() {
  static const std::set<std::string> Names = {
      "bool", "char", "str",  "u8",  "u16",   "u32",   "u64",  "u128",
      "usize", "i8",  "i16",  "i32", "i64",   "i128",  "isize", "f32",
      "f64"};
  return Names;
}

/// Generic parameters in scope while parsing a signature or struct.
struct Scope {
  std::vector<std::string> Lifetimes;
  std::vector<std::string> Types;
  std::optional<SubjectType> SelfType;

  bool hasLifetime(const std::string &N) const {
    return std::find(Lifetimes.begin(), Lifetimes.end(), N) != Lifetimes.end();
  }
  bool hasType(const std::string &N) const {
    return std::find(Types.begin(), Types.end(), N) != Types.end();
  }
};

/// Result of parsing `<...>` on an item.
struct Generics {
  std::vector<std::string> Lifetimes;
  std::vector<std::string> Types;
  std::vector<std::pair<std::string, Lifetime>> TypeBounds;
  std::vector<std::pair<Lifetime, Lifetime>> LifetimeBounds;
};

/// Raised inside a body; the caller turns it into a diagnostic.
struct BodySyntaxError {
  unsigned Line;
  std::string Message;
};

/// Replaces every Generic named in \p Bounds with one carrying those bounds.
SubjectType attachBounds(
    const SubjectType &T,
    const std::vector<std::pair<std::string, Lifetime>> &Bounds) {
  using K = SubjectType::Kind;
  auto Inner = [&](const SubjectType &I) { return attachBounds(I, Bounds); };
  switch (T.kind()) {
  case K::SharedRef:
    return SubjectType::sharedRef(T.lifetime(), Inner(T.inner()));
  case K::UniqueRef:
    return SubjectType::uniqueRef(T.lifetime(), Inner(T.inner()));
  case K::RawShared:
    return SubjectType::rawShared(Inner(T.inner()));
  case K::RawUnique:
    return SubjectType::rawUnique(Inner(T.inner()));
  case K::Slice:
    return SubjectType::slice(Inner(T.inner()));
  case K::Adt: {
    std::vector<SubjectType> Args;
    for (const SubjectType &A : T.typeArgs())
      Args.push_back(Inner(A));
    return SubjectType::adt(T.name(), {T.lifetimeArgs().begin(),
                                       T.lifetimeArgs().end()},
                            std::move(Args));
  }
  case K::Generic: {
    std::vector<Lifetime> B;
    for (const auto &[Name, L] : Bounds)
      if (Name == T.name() && std::find(B.begin(), B.end(), L) == B.end())
        B.push_back(L);
    return SubjectType::generic(T.name(), std::move(B));
  }
  case K::Prim:
    return T;
  }
  return T;
}

class Parser {
public:
  Parser(std::vector<Token> Toks, std::string File)
      : Toks(std::move(Toks)), File(std::move(File)) {}

  ParsedCrate run() {
    parseItems(/*UntilBrace=*/false);
    // Struct field types may mention structs declared later; nothing to fix
    // up since names resolve lazily through the table.
    return std::move(Out);
  }

private:
  //===-- Token helpers ---------------------------------------------------===//

  const Token &peek(std::size_t Ahead = 0) const {
    std::size_t I = std::min(Pos + Ahead, Toks.size() - 1);
    return Toks[I];
  }
  bool atEnd() const { return peek().K == Token::Kind::Eof; }
  bool is(std::string_view Text, std::size_t Ahead = 0) const {
    const Token &T = peek(Ahead);
    return (T.K == Token::Kind::Punct || T.K == Token::Kind::Ident) &&
           T.Text == Text;
  }
  bool isIdent(std::size_t Ahead = 0) const {
    return peek(Ahead).K == Token::Kind::Ident;
  }
  bool isLifetime(std::size_t Ahead = 0) const {
    return peek(Ahead).K == Token::Kind::Lifetime;
  }
  const Token &take() {
    const Token &T = peek();
    if (!atEnd())
      ++Pos;
    return T;
  }
  bool accept(std::string_view Text) {
    if (!is(Text))
      return false;
    take();
    return true;
  }

  [[noreturn]] void fail(const Token &At, const std::string &Msg) const {
    if (InBody)
      throw BodySyntaxError{At.Line, Msg};
    throw ParseError(File, At.Line, At.Column, Msg);
  }
  [[noreturn]] void fail(const std::string &Msg) const { fail(peek(), Msg); }

  void expect(std::string_view Text) {
    if (!accept(Text))
      fail("expected '" + std::string(Text) + "', found '" +
           describe(peek()) + "'");
  }
  std::string expectIdent() {
    if (!isIdent())
      fail("expected identifier, found '" + describe(peek()) + "'");
    return take().Text;
  }
  static std::string describe(const Token &T) {
    return T.K == Token::Kind::Eof ? "end of file"
           : T.K == Token::Kind::Lifetime ? "'" + T.Text
                                          : T.Text;
  }

  /// Skips a balanced (), [] or {} group starting at the current opener.
  void skipGroup() {
    const Token &Open = peek();
    std::vector<std::string> Stack;
    do {
      const Token &T = take();
      if (T.K == Token::Kind::Eof)
        fail(Open, "unbalanced delimiter");
      if (T.K != Token::Kind::Punct)
        continue;
      if (T.Text == "(" || T.Text == "[" || T.Text == "{")
        Stack.push_back(T.Text);
      else if (T.Text == ")" || T.Text == "]" || T.Text == "}") {
        static const std::map<std::string, std::string> Match = {
            {")", "("}, {"]", "["}, {"}", "{"}};
        if (Stack.empty() || Stack.back() != Match.at(T.Text))
          fail(T, "mismatched '" + T.Text + "'");
        Stack.pop_back();
      }
    } while (!Stack.empty());
  }

  /// Skips tokens up to and including the next `;` at nesting depth zero, or
  /// through a braced group if one comes first.
  void skipItem() {
    while (!atEnd()) {
      if (is("(") || is("[")) {
        skipGroup();
      } else if (is("{")) {
        skipGroup();
        accept(";");
        return;
      } else if (take().Text == ";" ) {
        return;
      }
    }
  }

  void skipAttributes() {
    while (is("#")) {
      take();
      accept("!");
      if (!is("["))
        fail("expected '[' after '#'");
      skipGroup();
    }
  }

  void skipVisibility() {
    if (accept("pub") && is("("))
      skipGroup();
  }

  //===-- Items -----------------------------------------------------------===//

  void parseItems(bool UntilBrace) {
    while (!atEnd()) {
      if (UntilBrace && is("}"))
        return;
      parseItem();
    }
    if (UntilBrace)
      fail("expected '}'");
  }

  void parseItem() {
    skipAttributes();
    skipVisibility();
    if (accept(";"))
      return;
    if (is("struct") || is("union")) {
      parseStruct();
      return;
    }
    if (is("enum")) {
      parseEnum();
      return;
    }
    if (is("impl") || (is("unsafe") && is("impl", 1))) {
      accept("unsafe");
      parseImpl();
      return;
    }
    if (isFnStart()) {
      parseFunction(nullptr, {});
      return;
    }
    if (is("mod")) {
      take();
      expectIdent();
      if (accept(";"))
        return;
      expect("{");
      parseItems(/*UntilBrace=*/true);
      expect("}");
      return;
    }
    if (is("macro_rules")) {
      take();
      expect("!");
      expectIdent();
      skipGroup();
      accept(";");
      return;
    }
    if (is("use") || is("extern") || is("const") || is("static") ||
        is("type") || is("trait") || (is("unsafe") && is("trait", 1)) ||
        (isIdent() && is("!", 1))) {
      skipItem();
      return;
    }
    fail("expected item, found '" + describe(peek()) + "'");
  }

  bool isFnStart() const {
    std::size_t I = 0;
    while (is("const", I) || is("async", I) || is("unsafe", I) ||
           is("extern", I) || is("default", I)) {
      if (is("extern", I) && peek(I + 1).K == Token::Kind::Str)
        ++I;
      ++I;
    }
    return is("fn", I);
  }

  Generics parseGenerics() {
    Generics G;
    if (!accept("<"))
      return G;
    while (!accept(">")) {
      skipAttributes();
      if (isLifetime()) {
        const Token &LT = take();
        G.Lifetimes.push_back(LT.Text);
        if (accept(":")) {
          do {
            if (!isLifetime())
              fail("expected lifetime bound");
            G.LifetimeBounds.emplace_back(Lifetime::named(LT.Text),
                                          Lifetime::named(take().Text));
          } while (accept("+"));
        }
      } else if (accept("const")) {
        expectIdent();
        expect(":");
        parseTypeSkip();
      } else {
        std::string Name = expectIdent();
        G.Types.push_back(Name);
        if (accept(":"))
          parseBounds(Name, G.TypeBounds);
        if (accept("="))
          parseTypeSkip();
      }
      if (!accept(",")) {
        expect(">");
        break;
      }
    }
    return G;
  }

  /// Parses `Bound + Bound + ...`, recording lifetime bounds for \p Name and
  /// skipping trait bounds.
  void parseBounds(const std::string &Name,
                   std::vector<std::pair<std::string, Lifetime>> &Bounds) {
    do {
      if (isLifetime()) {
        Bounds.emplace_back(Name, Lifetime::named(take().Text));
        continue;
      }
      skipTraitBound();
    } while (accept("+"));
  }

  /// `?Sized`, `for<'a> Fn(&'a T) -> U`, `Iterator<Item = T>`, `(Trait)`.
  void skipTraitBound() {
    accept("?");
    if (accept("for"))
      skipAngles();
    if (is("(")) {
      skipGroup();
      return;
    }
    accept("::");
    if (!isIdent())
      fail("expected trait bound, found '" + describe(peek()) + "'");
    while (true) {
      take();
      if (is("<"))
        skipAngles();
      if (is("(")) {
        skipGroup();
        if (accept("->"))
          parseTypeSkip();
      }
      if (!accept("::"))
        return;
      if (!isIdent())
        fail("expected path segment");
    }
  }

  void skipAngles() {
    expect("<");
    unsigned Depth = 1;
    while (Depth > 0) {
      if (atEnd())
        fail("unterminated '<'");
      const Token &T = take();
      if (T.K != Token::Kind::Punct)
        continue;
      if (T.Text == "<")
        ++Depth;
      else if (T.Text == ">")
        --Depth;
      else if (T.Text == "(" || T.Text == "[" || T.Text == "{") {
        --Pos;
        skipGroup();
      }
    }
  }

  void parseWhere(const Scope &S,
                  std::vector<std::pair<std::string, Lifetime>> &TypeBounds,
                  std::vector<std::pair<Lifetime, Lifetime>> &LtBounds) {
    if (!accept("where"))
      return;
    while (!is("{") && !is(";") && !atEnd()) {
      if (isLifetime()) {
        const Token &LT = take();
        expect(":");
        do {
          if (!isLifetime())
            fail("expected lifetime bound");
          LtBounds.emplace_back(checkedLifetime(LT, S),
                                checkedLifetime(take(), S));
        } while (accept("+"));
      } else {
        if (accept("for"))
          skipAngles();
        const Token &At = peek();
        SubjectType T = parseType(S);
        expect(":");
        std::string Key = T.kind() == SubjectType::Kind::Generic ? T.name()
                                                                   : "";
        std::vector<std::pair<std::string, Lifetime>> Found;
        parseBounds(Key, Found);
        for (auto &[N, L] : Found) {
          Lifetime Checked = checkedLifetime(
              Token{Token::Kind::Lifetime, L.str().substr(1), At.Line,
                    At.Column},
              S);
          if (!Key.empty())
            TypeBounds.emplace_back(N, Checked);
        }
      }
      if (!accept(","))
        break;
    }
  }

  Lifetime checkedLifetime(const Token &T, const Scope &S) const {
    if (T.Text == "static")
      return Lifetime::staticLifetime();
    if (T.Text == "_")
      return Lifetime::wildcard();
    if (!S.hasLifetime(T.Text))
      fail(T, "use of undeclared lifetime '" + T.Text);
    return Lifetime::named(T.Text);
  }

  //===-- Types -----------------------------------------------------------===//

  /// Parses and discards a type; used where no scope checking applies.
  void parseTypeSkip() {
    Scope Loose;
    bool Saved = LooseLifetimes;
    LooseLifetimes = true;
    parseType(Loose);
    LooseLifetimes = Saved;
  }

  Lifetime typeLifetime(const Token &T, const Scope &S) const {
    if (LooseLifetimes)
      return T.Text == "_" ? Lifetime::wildcard() : Lifetime::named(T.Text);
    if (T.Text == "_" && !AllowWildcard)
      fail(T, "'_ is not allowed here");
    return checkedLifetime(T, S);
  }

  SubjectType parseType(const Scope &S) {
    const Token &Start = peek();
    if (is("&") || is("&&")) {
      bool Double = take().Text == "&&";
      Lifetime L = Lifetime::elided();
      if (isLifetime())
        L = typeLifetime(take(), S);
      bool Mut = accept("mut");
      SubjectType Inner = parseType(S);
      SubjectType Ref = Mut ? SubjectType::uniqueRef(L, Inner)
                            : SubjectType::sharedRef(L, Inner);
      return Double ? SubjectType::sharedRef(Lifetime::elided(), Ref) : Ref;
    }
    if (accept("*")) {
      if (accept("mut"))
        return SubjectType::rawUnique(parseType(S));
      if (accept("const"))
        return SubjectType::rawShared(parseType(S));
      fail("expected 'const' or 'mut' after '*'");
    }
    if (accept("[")) {
      SubjectType Elem = parseType(S);
      if (accept(";")) {
        skipUntilCloseBracket();
        return SubjectType::adt("array", {}, {Elem});
      }
      expect("]");
      return SubjectType::slice(Elem);
    }
    if (accept("(")) {
      if (accept(")"))
        return SubjectType::prim("()");
      std::vector<SubjectType> Elems;
      bool Trailing = false;
      do {
        if (is(")")) {
          Trailing = true;
          break;
        }
        Elems.push_back(parseType(S));
      } while (accept(","));
      expect(")");
      if (Elems.size() == 1 && !Trailing)
        return Elems.front();
      return SubjectType::adt("tuple", {}, std::move(Elems));
    }
    if (accept("!"))
      return SubjectType::prim("!");
    if (is("_")) {
      take();
      return SubjectType::prim("_");
    }
    if (is("dyn") || is("impl")) {
      std::string Kw = take().Text;
      std::string Name = Kw + " " + boundHeadName();
      std::vector<std::pair<std::string, Lifetime>> Ignored;
      parseBounds("", Ignored);
      return SubjectType::adt(Name);
    }
    if (is("unsafe") || is("extern") || is("fn") || is("for")) {
      if (accept("for"))
        skipAngles();
      accept("unsafe");
      if (accept("extern") && peek().K == Token::Kind::Str)
        take();
      expect("fn");
      if (!is("("))
        fail("expected '(' in fn pointer type");
      skipGroup();
      if (accept("->"))
        parseTypeSkip();
      return SubjectType::prim("fn()");
    }
    if (is("<")) {
      // Qualified path `<T as Trait>::Assoc`: opaque.
      skipAngles();
      while (accept("::"))
        expectIdent();
      return SubjectType::adt("<qualified>");
    }
    if (isIdent() || is("::"))
      return parsePathType(S);
    fail(Start, "expected type, found '" + describe(Start) + "'");
  }

  /// Peeks the first path of a bound list for naming `dyn Trait` types.
  std::string boundHeadName() const {
    std::size_t I = 0;
    std::string Name;
    while (is("?", I) || is("::", I))
      ++I;
    while (isIdent(I)) {
      Name += peek(I).Text;
      if (!is("::", I + 1))
        break;
      Name += "::";
      I += 2;
    }
    return Name.empty() ? "?" : Name;
  }

  void skipUntilCloseBracket() {
    while (!is("]")) {
      if (atEnd())
        fail("expected ']'");
      if (is("(") || is("[") || is("{"))
        skipGroup();
      else
        take();
    }
    take();
  }

  SubjectType parsePathType(const Scope &S) {
    accept("::");
    std::string Name;
    std::vector<Lifetime> Lts;
    std::vector<SubjectType> Tys;
    while (true) {
      std::string Seg = expectIdent();
      Name += Seg;
      if (is("<") || (is("::") && is("<", 1))) {
        accept("::");
        parseGenericArgs(S, Lts, Tys);
      }
      if (is("::") && isIdent(1)) {
        take();
        Name += "::";
        Lts.clear();
        Tys.clear();
        continue;
      }
      break;
    }
    if (Name == "Self") {
      if (!S.SelfType)
        fail("'Self' outside of an impl");
      return *S.SelfType;
    }
    if (Name.rfind("Self::", 0) == 0)
      return SubjectType::adt(Name);
    if (Lts.empty() && Tys.empty()) {
      if (S.hasType(Name))
        return SubjectType::generic(Name);
      if (primitiveNames().count(Name))
        return SubjectType::prim(Name);
    }
    return SubjectType::adt(Name, std::move(Lts), std::move(Tys));
  }

  void parseGenericArgs(const Scope &S, std::vector<Lifetime> &Lts,
                        std::vector<SubjectType> &Tys) {
    expect("<");
    while (!accept(">")) {
      if (isLifetime()) {
        Lts.push_back(typeLifetime(take(), S));
      } else if (isIdent() && (is("=", 1) || (is(":", 1) && !is("::", 1)))) {
        // Associated type binding or constraint: `Item = T`.
        take();
        if (accept("="))
          parseType(S);
        else {
          std::vector<std::pair<std::string, Lifetime>> Ignored;
          parseBounds("", Ignored);
        }
      } else if (peek().K == Token::Kind::Int || is("{")) {
        if (is("{"))
          skipGroup();
        else
          take();
      } else {
        Tys.push_back(parseType(S));
      }
      if (!accept(",")) {
        expect(">");
        break;
      }
    }
  }

  //===-- Structs and impls -----------------------------------------------===//

  void parseStruct() {
    const Token &Kw = take();
    StructDef Def;
    Def.Line = Kw.Line;
    Def.Name = expectIdent();
    Generics G = parseGenerics();
    Scope S{G.Lifetimes, G.Types, std::nullopt};
    S.SelfType = selfTypeFor(Def.Name, G);
    std::vector<std::pair<std::string, Lifetime>> Bounds = G.TypeBounds;
    std::vector<std::pair<Lifetime, Lifetime>> LtBounds = G.LifetimeBounds;
    parseWhere(S, Bounds, LtBounds);
    if (is("(")) {
      take();
      unsigned Idx = 0;
      while (!accept(")")) {
        skipAttributes();
        skipVisibility();
        Def.Fields.emplace_back(std::to_string(Idx++), parseType(S));
        if (!accept(",")) {
          expect(")");
          break;
        }
      }
      parseWhere(S, Bounds, LtBounds);
      expect(";");
    } else if (!accept(";")) {
      expect("{");
      while (!accept("}")) {
        skipAttributes();
        skipVisibility();
        std::string FieldName = expectIdent();
        expect(":");
        Def.Fields.emplace_back(FieldName, parseType(S));
        if (!accept(",")) {
          expect("}");
          break;
        }
      }
    }
    for (auto &F : Def.Fields)
      F.second = attachBounds(F.second, Bounds);
    finishStructDef(Def, G, Bounds);
    Out.Structs.add(std::move(Def));
  }

  void parseEnum() {
    const Token &Kw = take();
    StructDef Def;
    Def.Line = Kw.Line;
    Def.Name = expectIdent();
    Generics G = parseGenerics();
    Scope S{G.Lifetimes, G.Types, std::nullopt};
    std::vector<std::pair<std::string, Lifetime>> Bounds = G.TypeBounds;
    std::vector<std::pair<Lifetime, Lifetime>> LtBounds;
    parseWhere(S, Bounds, LtBounds);
    if (!is("{"))
      fail("expected '{' after enum header");
    skipGroup();
    Def.Opaque = true;
    finishStructDef(Def, G, Bounds);
    Out.Structs.add(std::move(Def));
  }

  static void
  finishStructDef(StructDef &Def, const Generics &G,
                  const std::vector<std::pair<std::string, Lifetime>> &Bounds) {
    Def.LifetimeParams = G.Lifetimes;
    Def.TypeParams = G.Types;
    for (const std::string &T : G.Types) {
      std::vector<Lifetime> B;
      for (const auto &[N, L] : Bounds)
        if (N == T && std::find(B.begin(), B.end(), L) == B.end())
          B.push_back(L);
      Def.TypeParamBounds.push_back(std::move(B));
    }
  }

  static SubjectType selfTypeFor(const std::string &Name, const Generics &G) {
    std::vector<Lifetime> Lts;
    for (const std::string &L : G.Lifetimes)
      Lts.push_back(Lifetime::named(L));
    std::vector<SubjectType> Tys;
    for (const std::string &T : G.Types)
      Tys.push_back(SubjectType::generic(T));
    return SubjectType::adt(Name, std::move(Lts), std::move(Tys));
  }

  void parseImpl() {
    expect("impl");
    Generics G = parseGenerics();
    Scope S{G.Lifetimes, G.Types, std::nullopt};
    accept("!");
    AllowWildcard = true;
    SubjectType First = parseType(S);
    std::optional<std::string> Trait;
    SubjectType Target = First;
    if (accept("for")) {
      Trait = First.kind() == SubjectType::Kind::Adt ? First.name() : "?";
      Target = parseType(S);
    }
    AllowWildcard = false;
    std::vector<std::pair<std::string, Lifetime>> Bounds = G.TypeBounds;
    std::vector<std::pair<Lifetime, Lifetime>> LtBounds = G.LifetimeBounds;
    parseWhere(S, Bounds, LtBounds);
    Target = attachBounds(Target, Bounds);
    S.SelfType = Target;

    std::optional<ImplRef> Impl;
    if (Target.kind() == SubjectType::Kind::Adt) {
      Impl = ImplRef{Target.name(),
                     {Target.lifetimeArgs().begin(), Target.lifetimeArgs().end()},
                     {Target.typeArgs().begin(), Target.typeArgs().end()},
                     Trait};
    }
    ImplContext Ctx{Impl, S, Bounds, LtBounds};

    expect("{");
    while (!accept("}")) {
      if (atEnd())
        fail("expected '}' closing impl block");
      skipAttributes();
      skipVisibility();
      if (isFnStart()) {
        if (Impl)
          parseFunction(&Ctx, S);
        else
          parseFunction(nullptr, S); // impl on a non-struct type
      } else if (accept(";")) {
      } else {
        skipItem();
      }
    }
  }

  //===-- Functions -------------------------------------------------------===//

  struct ImplContext {
    std::optional<ImplRef> Impl;
    Scope ImplScope;
    std::vector<std::pair<std::string, Lifetime>> Bounds;
    std::vector<std::pair<Lifetime, Lifetime>> LtBounds;
  };

  void parseFunction(const ImplContext *Ctx, Scope Outer) {
    bool Async = false;
    while (!is("fn")) {
      if (is("async"))
        Async = true;
      if (accept("extern") && peek().K == Token::Kind::Str) {
        take();
        continue;
      }
      take();
    }
    const Token &FnTok = take();
    ast::FunctionAst F;
    FunctionModel &M = F.Signature;
    M.Span = SourceSpan{File, FnTok.Line, FnTok.Line};
    M.Name = expectIdent();
    if (Ctx)
      M.ImplOf = Ctx->Impl;

    Generics G = parseGenerics();
    Scope S = Outer;
    for (const std::string &L : G.Lifetimes)
      S.Lifetimes.push_back(L);
    for (const std::string &T : G.Types)
      S.Types.push_back(T);
    M.LifetimeParams = G.Lifetimes;
    M.TypeParams = G.Types;

    AllowWildcard = true;
    expect("(");
    parseSelfParam(M, S);
    while (!accept(")")) {
      skipAttributes();
      std::string Name = parseParamPattern(M.Params.size());
      expect(":");
      M.Params.push_back(Param{Name, parseType(S)});
      if (!accept(",")) {
        expect(")");
        break;
      }
    }
    if (accept("->"))
      M.ReturnType = parseType(S);
    AllowWildcard = false;

    std::vector<std::pair<std::string, Lifetime>> Bounds = G.TypeBounds;
    std::vector<std::pair<Lifetime, Lifetime>> LtBounds = G.LifetimeBounds;
    parseWhere(S, Bounds, LtBounds);
    M.WhereBounds = Bounds;
    M.LifetimeBounds = LtBounds;
    if (Ctx) {
      Bounds.insert(Bounds.end(), Ctx->Bounds.begin(), Ctx->Bounds.end());
      M.LifetimeBounds.insert(M.LifetimeBounds.end(), Ctx->LtBounds.begin(),
                              Ctx->LtBounds.end());
    }
    for (Param &P : M.Params)
      P.Type = attachBounds(P.Type, Bounds);
    if (M.ReturnType)
      M.ReturnType = attachBounds(*M.ReturnType, Bounds);
    if (M.Self && M.Self->Type)
      M.Self->Type = attachBounds(*M.Self->Type, Bounds);

    if (accept(";")) {
      M.BodyDiagnostic = "no body";
      Out.Functions.push_back(std::move(F));
      return;
    }
    if (!is("{"))
      fail("expected '{' or ';' after function signature");
    std::size_t BodyStart = Pos;
    skipGroup();
    std::size_t BodyEnd = Pos;
    M.Span.EndLine = Toks[BodyEnd - 1].Line;

    if (Async) {
      M.BodyDiagnostic = "async function body not supported";
    } else {
      std::size_t Saved = Pos;
      Pos = BodyStart;
      InBody = true;
      BodyScope = S;
      try {
        F.Body = parseBlock();
        if (Pos != BodyEnd)
          fail("trailing tokens in function body");
      } catch (const BodySyntaxError &E) {
        F.Body.reset();
        M.BodyDiagnostic =
            "line " + std::to_string(E.Line) + ": " + E.Message;
      } catch (const ParseError &E) {
        F.Body.reset();
        M.BodyDiagnostic = E.what();
      }
      InBody = false;
      Pos = Saved;
    }
    Out.Functions.push_back(std::move(F));
  }

  void parseSelfParam(FunctionModel &M, const Scope &S) {
    std::size_t Save = Pos;
    skipAttributes();
    SelfParam P;
    if (is("&")) {
      take();
      if (isLifetime())
        P.RefLifetime = typeLifetime(take(), S);
      P.F = accept("mut") ? SelfParam::Form::MutRef : SelfParam::Form::Ref;
      if (!accept("self")) {
        Pos = Save;
        return;
      }
    } else if (is("self") || (is("mut") && is("self", 1))) {
      accept("mut");
      take();
      P.F = SelfParam::Form::Value;
      if (accept(":")) {
        P.F = SelfParam::Form::Explicit;
        P.Type = parseType(S);
      }
    } else {
      Pos = Save;
      return;
    }
    M.Self = P;
    if (!accept(","))
      if (!is(")"))
        fail("expected ',' or ')' after self parameter");
  }

  /// Returns the bound name, or a synthetic one for destructuring patterns.
  std::string parseParamPattern(std::size_t Index) {
    accept("mut");
    if (isIdent() && is(":", 1) && peek().Text != "_")
      return take().Text;
    if (is("_") && is(":", 1)) {
      take();
      return "_" + std::to_string(Index);
    }
    while (!atEnd() && !(is(":") && !is("::"))) {
      if (is("(") || is("[") || is("{"))
        skipGroup();
      else
        take();
    }
    return "_" + std::to_string(Index);
  }

  //===-- Bodies ----------------------------------------------------------===//

  static ExprPtr mk(Expr::Kind K, unsigned Line, std::string Name = "") {
    auto E = std::make_unique<Expr>();
    E->K = K;
    E->Line = Line;
    E->Name = std::move(Name);
    return E;
  }

  ast::Block parseBlock() {
    expect("{");
    ast::Block B;
    while (!accept("}")) {
      if (atEnd())
        fail("expected '}'");
      if (accept(";"))
        continue;
      skipAttributes();
      unsigned Line = peek().Line;
      if (is("let")) {
        B.Stmts.push_back(parseLet());
        continue;
      }
      if (isFnStart() || is("struct") || is("enum") || is("impl") ||
          is("use") || is("mod") || is("trait") ||
          (is("const") && isIdent(1) && !is("fn", 1)) ||
          (is("static") && isIdent(1))) {
        // Nested items would need their own scope; keep it explicit.
        ast::Stmt St;
        St.Line = Line;
        St.Value = mk(Expr::Kind::Unsupported, Line, "nested item");
        skipItem();
        B.Stmts.push_back(std::move(St));
        continue;
      }
      ExprPtr E = parseExpr(/*NoStruct=*/false);
      bool BlockLike = isBlockLike(*E);
      if (accept(";") || (BlockLike && !is("}"))) {
        ast::Stmt St;
        St.Line = Line;
        St.Value = std::move(E);
        B.Stmts.push_back(std::move(St));
        continue;
      }
      if (!is("}"))
        fail("expected ';' or '}' after expression");
      B.Tail = std::move(E);
    }
    return B;
  }

  static bool isBlockLike(const Expr &E) {
    switch (E.K) {
    case Expr::Kind::Block:
    case Expr::Kind::If:
    case Expr::Kind::Loop:
    case Expr::Kind::While:
      return true;
    case Expr::Kind::Unsupported:
      return E.Mutable; // set for block-shaped unsupported constructs
    default:
      return false;
    }
  }

  ast::Stmt parseLet() {
    const Token &Kw = take();
    ast::Stmt St;
    St.K = ast::Stmt::Kind::Let;
    St.Line = Kw.Line;
    bool Simple = false;
    accept("ref");
    accept("mut");
    if (isIdent() && !is("::", 1) && !is("(", 1) && !is("{", 1)) {
      St.Name = take().Text;
      Simple = true;
    } else {
      // Destructuring pattern.
      while (!atEnd() && !is("=") && !(is(":") && !is("::")) && !is(";")) {
        if (is("(") || is("[") || is("{"))
          skipGroup();
        else
          take();
      }
    }
    if (accept(":"))
      St.DeclaredType = parseTypeInBody();
    if (accept("="))
      St.Value = parseExpr(false);
    if (is("else")) {
      take();
      parseBlock();
      Simple = false;
    }
    expect(";");
    if (!Simple) {
      St.K = ast::Stmt::Kind::Expr;
      St.Value = mk(Expr::Kind::Unsupported, Kw.Line, "destructuring let");
      St.DeclaredType.reset();
    }
    return St;
  }

  SubjectType parseTypeInBody() {
    bool Saved = AllowWildcard;
    AllowWildcard = true;
    // Lifetimes inside bodies are not checked against the signature.
    bool SavedLoose = LooseLifetimes;
    LooseLifetimes = true;
    SubjectType T = parseType(BodyScope);
    LooseLifetimes = SavedLoose;
    AllowWildcard = Saved;
    return T;
  }

  ExprPtr parseExpr(bool NoStruct) { return parseAssign(NoStruct); }

  ExprPtr parseAssign(bool NoStruct) {
    ExprPtr L = parseRange(NoStruct);
    unsigned Line = peek().Line;
    if (is("=")) {
      take();
      auto E = mk(Expr::Kind::Assign, Line);
      E->Lhs = std::move(L);
      E->Rhs = parseAssign(NoStruct);
      return E;
    }
    static const std::set<std::string> Compound = {"+=", "-=", "*=", "/=",
                                                   "|=", "%=", "^=", "&="};
    if (peek().K == Token::Kind::Punct && Compound.count(peek().Text)) {
      auto E = mk(Expr::Kind::CompoundAssign, Line, take().Text);
      E->Lhs = std::move(L);
      E->Rhs = parseAssign(NoStruct);
      return E;
    }
    // `a %= b`, `a ^= b`, `a &= b`, `a <<= b` lex as two tokens.
    if ((is("%") || is("^") || is("&")) && is("=", 1)) {
      std::string Op = take().Text;
      take();
      auto E = mk(Expr::Kind::CompoundAssign, Line, Op + "=");
      E->Lhs = std::move(L);
      E->Rhs = parseAssign(NoStruct);
      return E;
    }
    return L;
  }

  bool startsExpr() const {
    const Token &T = peek();
    if (T.K == Token::Kind::Eof)
      return false;
    if (T.K != Token::Kind::Punct)
      return !(T.K == Token::Kind::Ident && (T.Text == "as" || T.Text == "else"));
    static const std::set<std::string> Starts = {"(", "[", "&", "&&", "*",
                                                 "-", "!", "|", "||", "::",
                                                 "<", "{"};
    return Starts.count(T.Text);
  }

  ExprPtr parseRange(bool NoStruct) {
    unsigned Line = peek().Line;
    ExprPtr L;
    if (!is("..") && !is("..="))
      L = parseBinary(0, NoStruct);
    if (is("..") || is("..=")) {
      std::string Op = take().Text;
      auto E = mk(Expr::Kind::Unsupported, Line, "range expression");
      if (startsExpr() && !(NoStruct && is("{")))
        E->Rhs = parseBinary(0, NoStruct);
      E->Lhs = std::move(L);
      return E;
    }
    return L;
  }

  static int precedence(const std::string &Op) {
    if (Op == "||")
      return 1;
    if (Op == "&&")
      return 2;
    if (Op == "==" || Op == "!=" || Op == "<" || Op == ">" || Op == "<=" ||
        Op == ">=")
      return 3;
    if (Op == "|")
      return 4;
    if (Op == "^")
      return 5;
    if (Op == "&")
      return 6;
    if (Op == "<<" || Op == ">>")
      return 7;
    if (Op == "+" || Op == "-")
      return 8;
    if (Op == "*" || Op == "/" || Op == "%")
      return 9;
    return 0;
  }

  /// Reads a binary operator at the cursor without consuming it. `<<` and
  /// `>>` arrive as two tokens.
  std::string peekBinaryOp() const {
    const Token &T = peek();
    if (T.K != Token::Kind::Punct)
      return "";
    if ((T.Text == "<" || T.Text == ">") && is(T.Text, 1) && !is("=", 2))
      return T.Text + T.Text;
    if ((T.Text == "%" || T.Text == "^" || T.Text == "&" || T.Text == "|") &&
        is("=", 1))
      return "";
    return precedence(T.Text) ? T.Text : "";
  }

  ExprPtr parseBinary(int MinPrec, bool NoStruct) {
    ExprPtr L = parseCast(NoStruct);
    while (true) {
      std::string Op = peekBinaryOp();
      int Prec = Op.empty() ? 0 : precedence(Op);
      if (!Prec || Prec <= MinPrec)
        return L;
      unsigned Line = peek().Line;
      for (std::size_t I = 0; I < (Op.size() == 2 && Op[0] == Op[1] &&
                                           (Op[0] == '<' || Op[0] == '>')
                                       ? 2u
                                       : 1u);
           ++I)
        take();
      auto E = mk(Expr::Kind::Binary, Line, Op);
      E->Lhs = std::move(L);
      E->Rhs = parseBinary(Prec, NoStruct);
      L = std::move(E);
    }
  }

  ExprPtr parseCast(bool NoStruct) {
    ExprPtr L = parseUnary(NoStruct);
    while (is("as")) {
      unsigned Line = take().Line;
      parseTypeInBody();
      auto E = mk(Expr::Kind::Cast, Line);
      E->Lhs = std::move(L);
      L = std::move(E);
    }
    return L;
  }

  ExprPtr parseUnary(bool NoStruct) {
    unsigned Line = peek().Line;
    if (accept("*")) {
      auto E = mk(Expr::Kind::Deref, Line);
      E->Lhs = parseUnary(NoStruct);
      return E;
    }
    if (is("&") || is("&&")) {
      bool Double = take().Text == "&&";
      if (is("raw") && (is("const", 1) || is("mut", 1))) {
        take();
        bool Mut = take().Text == "mut";
        auto E = mk(Expr::Kind::Ref, Line);
        E->Mutable = Mut;
        E->Lhs = parseUnary(NoStruct);
        return E;
      }
      auto E = mk(Expr::Kind::Ref, Line);
      E->Mutable = accept("mut");
      E->Lhs = parseUnary(NoStruct);
      if (!Double)
        return E;
      auto Outer = mk(Expr::Kind::Ref, Line);
      Outer->Lhs = std::move(E);
      return Outer;
    }
    if (is("-") || is("!")) {
      auto E = mk(Expr::Kind::Unary, Line, take().Text);
      E->Lhs = parseUnary(NoStruct);
      return E;
    }
    return parsePostfix(NoStruct);
  }

  std::vector<ExprPtr> parseCallArgs() {
    expect("(");
    std::vector<ExprPtr> Args;
    while (!accept(")")) {
      Args.push_back(parseExpr(false));
      if (!accept(",")) {
        expect(")");
        break;
      }
    }
    return Args;
  }

  ExprPtr parsePostfix(bool NoStruct) {
    ExprPtr E = parsePrimary(NoStruct);
    while (true) {
      unsigned Line = peek().Line;
      if (is(".")) {
        take();
        if (peek().K == Token::Kind::Float) {
          // `x.0.1` lexes the indices as one float token.
          std::string Text = take().Text;
          std::size_t Dot = Text.find('.');
          auto A = mk(Expr::Kind::Field, Line, Text.substr(0, Dot));
          A->Lhs = std::move(E);
          auto B = mk(Expr::Kind::Field, Line, Text.substr(Dot + 1));
          B->Lhs = std::move(A);
          E = std::move(B);
          continue;
        }
        if (peek().K == Token::Kind::Int) {
          auto F = mk(Expr::Kind::Field, Line, take().Text);
          F->Lhs = std::move(E);
          E = std::move(F);
          continue;
        }
        if (is("await")) {
          take();
          auto U = mk(Expr::Kind::Unsupported, Line, "await");
          U->Lhs = std::move(E);
          E = std::move(U);
          continue;
        }
        std::string Name = expectIdent();
        if (is("::") && is("<", 1)) {
          take();
          skipAngles();
        }
        if (is("(")) {
          auto M = mk(Expr::Kind::MethodCall, Line, Name);
          M->Lhs = std::move(E);
          M->Args = parseCallArgs();
          E = std::move(M);
        } else {
          auto F = mk(Expr::Kind::Field, Line, Name);
          F->Lhs = std::move(E);
          E = std::move(F);
        }
        continue;
      }
      if (is("(")) {
        if (E->K != Expr::Kind::Path) {
          auto U = mk(Expr::Kind::Unsupported, Line, "call of a computed callee");
          U->Lhs = std::move(E);
          U->Args = parseCallArgs();
          E = std::move(U);
          continue;
        }
        auto C = mk(Expr::Kind::Call, Line, E->Name);
        C->Args = parseCallArgs();
        E = std::move(C);
        continue;
      }
      if (is("[")) {
        take();
        auto I = mk(Expr::Kind::Index, Line);
        I->Lhs = std::move(E);
        I->Rhs = parseExpr(false);
        expect("]");
        E = std::move(I);
        continue;
      }
      if (is("?")) {
        take();
        auto U = mk(Expr::Kind::Unsupported, Line, "'?' operator");
        U->Lhs = std::move(E);
        E = std::move(U);
        continue;
      }
      return E;
    }
  }

  /// Parses a path expression, including turbofish segments; returns the
  /// path text without generic arguments.
  std::string parseExprPath() {
    std::string Name;
    if (accept("::"))
      Name = "::";
    if (is("<")) {
      skipAngles();
      Name += "<qualified>";
      if (!accept("::"))
        return Name;
      Name += "::";
    }
    while (true) {
      Name += expectIdent();
      if (is("::") && is("<", 1)) {
        take();
        skipAngles();
      }
      if (is("::") && isIdent(1)) {
        take();
        Name += "::";
        continue;
      }
      return Name;
    }
  }

  ExprPtr blockShapedUnsupported(unsigned Line, std::string What) {
    auto U = mk(Expr::Kind::Unsupported, Line, std::move(What));
    U->Mutable = true;
    return U;
  }

  ExprPtr parsePrimary(bool NoStruct) {
    const Token &T = peek();
    unsigned Line = T.Line;
    switch (T.K) {
    case Token::Kind::Int:
    case Token::Kind::Float:
    case Token::Kind::Str:
    case Token::Kind::Char:
      return mk(Expr::Kind::Literal, Line, take().Text);
    case Token::Kind::Lifetime: {
      // Labeled loop: 'outer: loop { .. }
      take();
      expect(":");
      return parsePrimary(NoStruct);
    }
    case Token::Kind::Eof:
      fail("unexpected end of body");
    default:
      break;
    }

    if (is("(")) {
      take();
      if (accept(")"))
        return mk(Expr::Kind::Tuple, Line);
      ExprPtr First = parseExpr(false);
      if (accept(")"))
        return First;
      auto Tup = mk(Expr::Kind::Tuple, Line);
      Tup->Args.push_back(std::move(First));
      while (accept(",")) {
        if (is(")"))
          break;
        Tup->Args.push_back(parseExpr(false));
      }
      expect(")");
      return Tup;
    }
    if (is("[")) {
      skipGroup();
      return mk(Expr::Kind::Unsupported, Line, "array expression");
    }
    if (is("{")) {
      auto B = mk(Expr::Kind::Block, Line);
      B->Body = std::make_unique<ast::Block>(parseBlock());
      return B;
    }
    if (is("unsafe") && is("{", 1)) {
      take();
      auto B = mk(Expr::Kind::Block, Line);
      B->Body = std::make_unique<ast::Block>(parseBlock());
      return B;
    }
    if (is("|") || is("||") || is("move") ||
        (is("async") && (is("move", 1) || is("|", 1) || is("||", 1)))) {
      accept("async");
      accept("move");
      if (accept("|")) {
        while (!accept("|")) {
          if (atEnd())
            fail("unterminated closure parameters");
          if (is("(") || is("[") || is("{"))
            skipGroup();
          else
            take();
        }
      } else {
        expect("||");
      }
      if (accept("->"))
        parseTypeInBody();
      auto U = mk(Expr::Kind::Unsupported, Line, "closure");
      U->Lhs = parseExpr(NoStruct);
      return U;
    }
    if (is("async") && is("{", 1)) {
      take();
      skipGroup();
      return blockShapedUnsupported(Line, "async block");
    }
    if (accept("if")) {
      if (is("let")) {
        skipLetCondition();
        auto U = blockShapedUnsupported(Line, "if let");
        parseBlock();
        if (accept("else")) {
          if (is("if"))
            parsePrimary(false);
          else
            parseBlock();
        }
        return U;
      }
      auto E = mk(Expr::Kind::If, Line);
      E->Lhs = parseExpr(/*NoStruct=*/true);
      E->Body = std::make_unique<ast::Block>(parseBlock());
      if (accept("else")) {
        if (is("if")) {
          E->Else = parsePrimary(false);
        } else {
          auto B = mk(Expr::Kind::Block, peek().Line);
          B->Body = std::make_unique<ast::Block>(parseBlock());
          E->Else = std::move(B);
        }
      }
      return E;
    }
    if (accept("loop")) {
      auto E = mk(Expr::Kind::Loop, Line);
      E->Body = std::make_unique<ast::Block>(parseBlock());
      return E;
    }
    if (accept("while")) {
      if (is("let")) {
        skipLetCondition();
        parseBlock();
        return blockShapedUnsupported(Line, "while let");
      }
      auto E = mk(Expr::Kind::While, Line);
      E->Lhs = parseExpr(true);
      E->Body = std::make_unique<ast::Block>(parseBlock());
      return E;
    }
    if (accept("for")) {
      while (!is("in")) {
        if (atEnd())
          fail("expected 'in' in for loop");
        if (is("(") || is("[") || is("{"))
          skipGroup();
        else
          take();
      }
      take();
      parseExpr(true);
      parseBlock();
      return blockShapedUnsupported(Line, "for loop");
    }
    if (accept("match")) {
      parseExpr(true);
      if (!is("{"))
        fail("expected '{' after match scrutinee");
      skipGroup();
      return blockShapedUnsupported(Line, "match expression");
    }
    if (accept("break")) {
      if (isLifetime())
        take();
      auto E = mk(Expr::Kind::Break, Line);
      if (startsExpr() && !is("}") && !(NoStruct && is("{")))
        E->Lhs = parseExpr(NoStruct);
      return E;
    }
    if (accept("continue")) {
      if (isLifetime())
        take();
      return mk(Expr::Kind::Continue, Line);
    }
    if (accept("return")) {
      auto E = mk(Expr::Kind::Return, Line);
      if (startsExpr() && !is("}"))
        E->Lhs = parseExpr(NoStruct);
      return E;
    }
    if (is("true") || is("false"))
      return mk(Expr::Kind::Literal, Line, take().Text);

    if (isIdent() || is("::") || is("<")) {
      std::string Name = parseExprPath();
      if (is("!") && !is("=", 1)) {
        take();
        if (!is("(") && !is("[") && !is("{"))
          fail("expected macro arguments");
        bool Braced = is("{");
        skipGroup();
        auto U = Braced ? blockShapedUnsupported(Line, "macro " + Name + "!")
                        : mk(Expr::Kind::Unsupported, Line,
                             "macro " + Name + "!");
        return U;
      }
      if (is("{") && !NoStruct && looksLikeStructLiteral())
        return parseStructLiteral(Name, Line);
      return mk(Expr::Kind::Path, Line, Name);
    }
    fail("expected expression, found '" + describe(T) + "'");
  }

  void skipLetCondition() {
    expect("let");
    while (!is("=")) {
      if (atEnd())
        fail("expected '=' in let condition");
      if (is("(") || is("[") || is("{"))
        skipGroup();
      else
        take();
    }
    take();
    parseExpr(true);
  }

  /// `Name {` opens a struct literal when followed by `}`, `ident :`,
  /// `ident ,`, `ident }` or `..`.
  bool looksLikeStructLiteral() const {
    if (is("}", 1) || is("..", 1))
      return true;
    if (isIdent(1) || peek(1).K == Token::Kind::Int)
      return is(":", 2) || is(",", 2) || is("}", 2);
    return false;
  }

  ExprPtr parseStructLiteral(const std::string &Name, unsigned Line) {
    auto E = mk(Expr::Kind::StructLit, Line, Name);
    expect("{");
    while (!accept("}")) {
      if (accept("..")) {
        E->Lhs = parseExpr(false);
        expect("}");
        break;
      }
      unsigned FLine = peek().Line;
      std::string Field = peek().K == Token::Kind::Int ? take().Text
                                                       : expectIdent();
      ExprPtr Value;
      if (accept(":"))
        Value = parseExpr(false);
      else
        Value = mk(Expr::Kind::Path, FLine, Field);
      E->FieldInits.emplace_back(Field, std::move(Value));
      if (!accept(",")) {
        expect("}");
        break;
      }
    }
    return E;
  }

  std::vector<Token> Toks;
  std::string File;
  std::size_t Pos = 0;
  ParsedCrate Out;
  bool InBody = false;
  bool AllowWildcard = false;
  bool LooseLifetimes = false;
  Scope BodyScope;
};

} // namespace

ParsedCrate parseSyntax(std::string_view Source, const std::string &Filename) {
  return Parser(tokenize(Source, Filename), Filename).run();
}

CrateModel parseCrate(std::string_view Source, const std::string &Filename) {
  ParsedCrate Parsed = parseSyntax(Source, Filename);
  CrateModel Crate;
  Crate.Structs = std::move(Parsed.Structs);
  for (ast::FunctionAst &F : Parsed.Functions) {
    const std::string Where =
        Filename + ":" + std::to_string(F.Signature.Span.Line) + ": " +
        F.Signature.qualifiedName() + ": ";
    FunctionModel M;
    try {
      M = expandElision(resolveSelf(F.Signature, Crate.Structs), Crate.Structs);
    } catch (const ElisionError &E) {
      Crate.Diagnostics.push_back(Where + "skipped: " + E.what());
      continue;
    } catch (const ModelError &E) {
      Crate.Diagnostics.push_back(Where + "skipped: " + E.what());
      continue;
    }
    if (F.Body) {
      try {
        M.FnBody = lowerBody(*F.Body, M, Crate.Structs);
      } catch (const LoweringError &E) {
        M.BodyDiagnostic =
            "line " + std::to_string(E.line()) + ": " + E.what();
      }
    }
    if (!M.FnBody)
      Crate.Diagnostics.push_back(Where + "body unavailable (" +
                                  M.BodyDiagnostic + ")");
    Crate.Functions.push_back(std::move(M));
  }
  return Crate;
}

} // namespace lifecheck
