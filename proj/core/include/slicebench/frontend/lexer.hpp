#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slicebench/error.hpp"

namespace slicebench::frontend {

enum class TokenKind { Identifier, IntLiteral, FloatLiteral, CharLiteral, StringLiteral, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier/punct spelling, or decoded literal contents
  int line = 0;
  int column = 0;
  /// True when no whitespace or comment separates this token from the previous
  /// one. Lets the parser glue `>` `>` into a shift while generics stay split.
  bool glued = false;
  bool is_long = false;  // integer literal carried an L suffix

  bool is(std::string_view punct) const { return kind == TokenKind::Punct && text == punct; }
  bool is_word(std::string_view word) const { return kind == TokenKind::Identifier && text == word; }
};

/// Source-located failure to accept input. Carries an expected-token summary.
class ParseError : public Error {
 public:
  ParseError(int line, int column, std::string message, std::string expected = {});

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::string detail_;
  std::string expected_;
};

/// Splits Java-subset text into tokens. Comments are dropped; `>>`-style
/// operators are emitted as glued single `>` tokens.
std::vector<Token> tokenize(std::string_view source);

bool is_java_keyword(std::string_view word);

}  // namespace slicebench::frontend
