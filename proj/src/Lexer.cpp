//===- Lexer.cpp - Tokenizer for the analyzed language ---------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "lifecheck/Frontend.h"

#include <array>
#include <cctype>

namespace lifecheck {

ParseError::ParseError(std::string File, unsigned Line, unsigned Column,
                       const std::string &Message)
    : std::runtime_error(File + ":" + std::to_string(Line) + ":" +
                         std::to_string(Column) + ": " + Message),
      File(std::move(File)), Line(Line), Column(Column) {}

namespace {

bool isIdentStart(char C) {
  return std::isalpha(static_cast<unsigned char>(C)) || C == '_';
}
bool isIdentChar(char C) {
  return std::isalnum(static_cast<unsigned char>(C)) || C == '_';
}

// Longest match first.
constexpr std::array<std::string_view, 17> MultiPuncts = {
    "...", "..=", "::", "->", "=>", "==", "!=", "<=", ">=", "&&",
    "||",  "+=",  "-=", "*=", "/=", "..", "|="};

class Lexer {
public:
  Lexer(std::string_view Src, const std::string &File) : Src(Src), File(File) {}

  std::vector<Token> run() {
    std::vector<Token> Out;
    while (true) {
      skipTrivia();
      if (Pos >= Src.size()) {
        Out.push_back(Token{Token::Kind::Eof, "", Line, Col});
        return Out;
      }
      Out.push_back(next());
    }
  }

private:
  char peek(std::size_t Ahead = 0) const {
    return Pos + Ahead < Src.size() ? Src[Pos + Ahead] : '\0';
  }

  void advance() {
    if (Src[Pos] == '\n') {
      ++Line;
      Col = 1;
    } else {
      ++Col;
    }
    ++Pos;
  }

  void skipTrivia() {
    while (Pos < Src.size()) {
      char C = peek();
      if (std::isspace(static_cast<unsigned char>(C))) {
        advance();
      } else if (C == '/' && peek(1) == '/') {
        while (Pos < Src.size() && peek() != '\n')
          advance();
      } else if (C == '/' && peek(1) == '*') {
        unsigned Depth = 0;
        do {
          if (peek() == '/' && peek(1) == '*') {
            ++Depth;
            advance();
          } else if (peek() == '*' && peek(1) == '/') {
            --Depth;
            advance();
          }
          advance();
        } while (Pos < Src.size() && Depth > 0);
      } else {
        return;
      }
    }
  }

  Token next() {
    Token T;
    T.Line = Line;
    T.Column = Col;
    char C = peek();
    std::size_t Start = Pos;

    if (isIdentStart(C)) {
      // Raw strings and byte strings: r"..", r#".."#, b"..".
      if ((C == 'r' && (peek(1) == '"' || peek(1) == '#')) ||
          (C == 'b' && peek(1) == '"'))
        return lexString(T);
      while (isIdentChar(peek()))
        advance();
      T.K = Token::Kind::Ident;
      T.Text = std::string(Src.substr(Start, Pos - Start));
      return T;
    }
    if (std::isdigit(static_cast<unsigned char>(C))) {
      T.K = Token::Kind::Int;
      while (isIdentChar(peek()) ||
             (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        if (peek() == '.')
          T.K = Token::Kind::Float;
        advance();
      }
      T.Text = std::string(Src.substr(Start, Pos - Start));
      return T;
    }
    if (C == '"')
      return lexString(T);
    if (C == '\'') {
      // 'a is a lifetime unless a closing quote follows the next character.
      if (isIdentStart(peek(1)) && peek(2) != '\'') {
        advance();
        while (isIdentChar(peek()))
          advance();
        T.K = Token::Kind::Lifetime;
        T.Text = std::string(Src.substr(Start + 1, Pos - Start - 1));
        return T;
      }
      advance();
      if (peek() == '\\')
        advance();
      while (Pos < Src.size() && peek() != '\'')
        advance();
      if (Pos >= Src.size())
        throw ParseError(File, T.Line, T.Column, "unterminated character literal");
      advance();
      T.K = Token::Kind::Char;
      T.Text = std::string(Src.substr(Start, Pos - Start));
      return T;
    }
    for (std::string_view P : MultiPuncts) {
      if (Src.substr(Pos, P.size()) == P) {
        for (std::size_t I = 0; I < P.size(); ++I)
          advance();
        T.K = Token::Kind::Punct;
        T.Text = std::string(P);
        return T;
      }
    }
    advance();
    T.K = Token::Kind::Punct;
    T.Text = std::string(1, C);
    return T;
  }

  Token lexString(Token T) {
    std::size_t Start = Pos;
    unsigned Hashes = 0;
    bool Raw = false;
    if (peek() == 'b')
      advance();
    if (peek() == 'r') {
      Raw = true;
      advance();
      while (peek() == '#') {
        ++Hashes;
        advance();
      }
    }
    if (peek() != '"')
      throw ParseError(File, T.Line, T.Column, "malformed string literal");
    advance();
    while (true) {
      if (Pos >= Src.size())
        throw ParseError(File, T.Line, T.Column, "unterminated string literal");
      char C = peek();
      if (!Raw && C == '\\') {
        advance();
        advance();
        continue;
      }
      advance();
      if (C == '"') {
        unsigned Seen = 0;
        while (Seen < Hashes && peek() == '#') {
          ++Seen;
          advance();
        }
        if (Seen == Hashes)
          break;
      }
    }
    T.K = Token::Kind::Str;
    T.Text = std::string(Src.substr(Start, Pos - Start));
    return T;
  }

  std::string_view Src;
  const std::string &File;
  std::size_t Pos = 0;
  unsigned Line = 1;
  unsigned Col = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view Source, const std::string &File) {
  return Lexer(Source, File).run();
}

} // namespace lifecheck
