#include "slicebench/frontend/lexer.hpp"

#include <array>
#include <cctype>

namespace slicebench::frontend {

namespace {

std::string format_parse_error(int line, int column, const std::string& message,
                               const std::string& expected) {
  std::string out = "parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                    message;
  if (!expected.empty()) out += " (expected " + expected + ")";
  return out;
}

// Longest spellings first. `>`-led operators are handled separately.
constexpr std::array<std::string_view, 20> kMultiCharPunct = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<"};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$'; }
bool is_ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool glued = false;
    for (;;) {
      glued = !skip_trivia() && !out.empty();
      if (pos_ >= src_.size()) break;
      Token tok = next_token();
      tok.glued = glued;
      out.push_back(std::move(tok));
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line_;
    end.column = column_;
    out.push_back(end);
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if (src_[pos_] == '\r') {
      if (peek(1) != '\n') {
        ++line_;
        column_ = 1;
      }
    } else {
      ++column_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message, const std::string& expected = {}) const {
    throw ParseError(line_, column_, message, expected);
  }

  // Returns true if anything was skipped.
  bool skip_trivia() {
    bool skipped = false;
    while (pos_ < src_.size()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
        advance();
        skipped = true;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n' && peek() != '\r') advance();
        skipped = true;
      } else if (c == '/' && peek(1) == '*') {
        const int start_line = line_, start_col = column_;
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) throw ParseError(start_line, start_col, "unterminated block comment", "*/");
        advance();
        advance();
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  Token make(TokenKind kind, std::string text, int line, int column) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line;
    t.column = column;
    return t;
  }

  char read_escape() {
    advance();  // backslash
    if (pos_ >= src_.size()) fail("unterminated escape sequence");
    const char c = peek();
    advance();
    switch (c) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case 'b': return '\b';
      case 'f': return '\f';
      case '0': return '\0';
      case '\\': return '\\';
      case '\'': return '\'';
      case '"': return '"';
      default: fail(std::string("unsupported escape sequence \\") + c);
    }
  }

  Token next_token() {
    const int line = line_, column = column_;
    const unsigned char c = static_cast<unsigned char>(peek());

    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(peek()))) advance();
      return make(TokenKind::Identifier, std::string(src_.substr(start, pos_ - start)), line, column);
    }

    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number(line, column);
    }

    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') fail("text blocks are not supported");
      advance();
      std::string value;
      while (pos_ < src_.size() && peek() != '"') {
        if (peek() == '\n' || peek() == '\r') fail("unterminated string literal", "\"");
        if (peek() == '\\') {
          value += read_escape();
        } else {
          value += peek();
          advance();
        }
      }
      if (pos_ >= src_.size()) fail("unterminated string literal", "\"");
      advance();
      return make(TokenKind::StringLiteral, std::move(value), line, column);
    }

    if (c == '\'') {
      advance();
      if (pos_ >= src_.size()) fail("unterminated character literal", "'");
      char value;
      if (peek() == '\\') {
        value = read_escape();
      } else {
        value = peek();
        advance();
      }
      if (peek() != '\'') fail("unterminated character literal", "'");
      advance();
      return make(TokenKind::CharLiteral, std::string(1, value), line, column);
    }

    if (c == '>') {
      // `>=` is safe to merge; `>>`, `>>>` and their compound forms are left
      // as glued `>` tokens so `List<List<Integer>>` closes correctly.
      if (peek(1) == '=') {
        advance();
        advance();
        return make(TokenKind::Punct, ">=", line, column);
      }
      advance();
      return make(TokenKind::Punct, ">", line, column);
    }

    for (std::string_view p : kMultiCharPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        return make(TokenKind::Punct, std::string(p), line, column);
      }
    }

    static constexpr std::string_view kSingle = "(){}[];,.@=<!~?:+-*/&|^%";
    if (kSingle.find(static_cast<char>(c)) != std::string_view::npos) {
      advance();
      return make(TokenKind::Punct, std::string(1, static_cast<char>(c)), line, column);
    }

    if (c >= 0x80) fail("non-ASCII character outside a string or comment");
    fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
  }

  Token number(int line, int column) {
    const std::size_t start = pos_;
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        is_float = true;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      } else if (peek() == '.' && !is_ident_start(static_cast<unsigned char>(peek(1)))) {
        is_float = true;  // `1.` form
        advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent", "digit");
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    std::string text;
    for (std::size_t i = start; i < pos_; ++i) {
      if (src_[i] != '_') text += src_[i];
    }
    bool is_long = false;
    if (peek() == 'L' || peek() == 'l') {
      is_long = true;
      advance();
    } else if (peek() == 'd' || peek() == 'D' || peek() == 'f' || peek() == 'F') {
      is_float = true;
      advance();
    }
    if (is_ident_part(static_cast<unsigned char>(peek()))) fail("malformed numeric literal");
    Token t = make(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, std::move(text), line, column);
    t.is_long = is_long;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

ParseError::ParseError(int line, int column, std::string message, std::string expected)
    : Error("ParseError", format_parse_error(line, column, message, expected)),
      line_(line),
      column_(column),
      detail_(std::move(message)),
      expected_(std::move(expected)) {}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

bool is_java_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 50> kKeywords = {
      "abstract", "assert",     "boolean",   "break",     "byte",     "case",      "catch",
      "char",     "class",      "const",     "continue",  "default",  "do",        "double",
      "else",     "enum",       "extends",   "final",     "finally",  "float",     "for",
      "goto",     "if",         "implements", "import",   "instanceof", "int",     "interface",
      "long",     "native",     "new",       "package",   "private",  "protected", "public",
      "return",   "short",      "static",    "strictfp",  "super",    "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient", "try",      "void",      "volatile",
      "while"};
  for (auto kw : kKeywords) {
    if (kw == word) return true;
  }
  return word == "true" || word == "false" || word == "null";
}

}  // namespace slicebench::frontend
