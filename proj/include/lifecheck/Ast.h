//===- Ast.h - Syntax tree for function bodies -----------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Function bodies are parsed into this small expression tree and then lowered
// into the basic-block IR. Signatures and structs go straight to the model.
//
//===----------------------------------------------------------------------===//

#ifndef LIFECHECK_AST_H
#define LIFECHECK_AST_H

#include "lifecheck/Model.h"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lifecheck::ast {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;

struct Block {
  std::vector<Stmt> Stmts;
  ExprPtr Tail;
};

struct Expr {
  enum class Kind {
    Path,        // Name
    Literal,     // Name holds the spelling
    Deref,       // Lhs
    Ref,         // Lhs, Mutable
    Field,       // Lhs, Name
    Index,       // Lhs, Rhs
    Call,        // Name = callee path, Args
    MethodCall,  // Lhs = receiver, Name, Args
    StructLit,   // Name, FieldInits, Lhs = `..base`
    Tuple,       // Args
    Block,       // Body
    If,          // Lhs = cond, Body = then, Else
    Loop,        // Body
    While,       // Lhs = cond, Body
    Break,
    Continue,
    Return,      // Lhs (optional)
    Assign,      // Lhs, Rhs
    CompoundAssign,
    Binary,      // Lhs, Rhs, Name = operator
    Unary,       // Lhs, Name = operator
    Cast,        // Lhs
    Unsupported, // Name describes the construct
  };

  Kind K = Kind::Literal;
  std::string Name;
  ExprPtr Lhs;
  ExprPtr Rhs;
  std::vector<ExprPtr> Args;
  std::vector<std::pair<std::string, ExprPtr>> FieldInits;
  std::unique_ptr<Block> Body;
  ExprPtr Else;
  bool Mutable = false;
  unsigned Line = 0;
};

struct Stmt {
  enum class Kind { Let, Expr };
  Kind K = Kind::Expr;
  std::string Name;
  std::optional<SubjectType> DeclaredType;
  ExprPtr Value;
  unsigned Line = 0;
};

/// A parsed function: the signature model plus its unlowered body.
struct FunctionAst {
  FunctionModel Signature;
  std::optional<Block> Body;
};

} // namespace lifecheck::ast

#endif // LIFECHECK_AST_H
