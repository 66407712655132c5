//===- Frontend.h - Parsing, elision and lowering --------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_FRONTEND_H
#define LIFECHECK_FRONTEND_H

#include "lifecheck/Ast.h"
#include "lifecheck/Model.h"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lifecheck {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string File, unsigned Line, unsigned Column,
             const std::string &Message);
  const std::string &file() const { return File; }
  unsigned line() const { return Line; }
  unsigned column() const { return Column; }

private:
  std::string File;
  unsigned Line;
  unsigned Column;
};

/// An output lifetime that none of the elision rules can bind.
class ElisionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A body construct outside the IR vocabulary.
class LoweringError : public std::runtime_error {
public:
  LoweringError(unsigned Line, const std::string &Message)
      : std::runtime_error(Message), Line(Line) {}
  unsigned line() const { return Line; }

private:
  unsigned Line;
};

struct Token {
  enum class Kind { Ident, Lifetime, Int, Float, Str, Char, Punct, Eof };
  Kind K = Kind::Eof;
  std::string Text;
  unsigned Line = 1;
  unsigned Column = 1;
};

/// Splits source text into tokens; comments and whitespace are dropped.
std::vector<Token> tokenize(std::string_view Source, const std::string &File);

/// Parses structs, impl blocks and free functions. Malformed signatures or
/// struct definitions throw ParseError. Functions whose bodies use
/// unsupported constructs keep their signature and get a diagnostic; so do
/// functions whose output lifetime cannot be elided (those are dropped).
CrateModel parseCrate(std::string_view Source, const std::string &Filename);

/// Parses without elision or lowering; exposed for tests of the later steps.
struct ParsedCrate {
  StructTable Structs;
  std::vector<ast::FunctionAst> Functions;
};
ParsedCrate parseSyntax(std::string_view Source, const std::string &Filename);

/// Replaces elided and `'_` lifetimes with fresh anonymous ones and binds
/// elided output lifetimes. Expects resolveSelf to have run.
FunctionModel expandElision(const FunctionModel &Fn, const StructTable &Structs);

/// Lowers a parsed body into basic blocks. Throws LoweringError on
/// constructs outside the IR vocabulary.
Body lowerBody(const ast::Block &Body, const FunctionModel &Signature,
               const StructTable &Structs);

/// Renders structs and function signatures back to source. Bodies are
/// omitted (`;`), so reparsing yields the same structs and signatures.
std::string printCrate(const CrateModel &Crate);

} // namespace lifecheck

#endif // LIFECHECK_FRONTEND_H
