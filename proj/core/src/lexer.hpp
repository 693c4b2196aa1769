#pragma once

// Tokenizer and recursive-descent expression parser shared by the
// expression front end and the problem-file parser.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "afp/error.hpp"
#include "afp/expr.hpp"

namespace afp::detail {

enum class Tok {
  Number,
  Ident,
  Plus,
  Minus,
  Star,
  Slash,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Colon,
  Pipe,
  Equals,
  DotDot,
  End,
};

const char* tok_name(Tok t) noexcept;

struct Token;
std::string describe_token(const Token& t);

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  double number = 0.0;
  std::size_t column = 1;  // absolute, 1-based
};

class TokenStream {
 public:
  TokenStream(std::string_view text, std::size_t line, std::size_t first_column, std::string key);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool accept(Tok kind);
  Token expect(Tok kind, const char* what);
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const Token& at, const std::string& message) const;
  [[noreturn]] void fail_semantic(const Token& at, const std::string& message) const;

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::string key_;
};

/// Parses one expression from `ts`, stopping at the first token that cannot
/// continue it. Unknown variables are semantic errors.
Expr parse_expression(TokenStream& ts, std::initializer_list<Symbol> allowed);

}  // namespace afp::detail
