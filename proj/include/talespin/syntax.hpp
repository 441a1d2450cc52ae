#pragma once
//
// Tokenizer and term reader shared by the .kb and .grammar formats and by
// command-line term arguments.
//

#include <string>
#include <string_view>
#include <vector>

#include "talespin/term.hpp"

namespace talespin {

struct SourceLocation {
  int line = 1;
  int column = 1;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLocation where;
  std::string message;

  /// `file:line:col: severity: message`; the position is left out when unknown.
  std::string format(std::string_view file) const {
    std::string out(file);
    if (where.line > 0) out += ':' + std::to_string(where.line) + ':' + std::to_string(where.column);
    out += ": ";
    out += severity == Severity::Error ? "error" : "warning";
    out += ": " + message;
    return out;
  }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

class ParseError : public Error {
 public:
  ParseError(SourceLocation where, const std::string& message)
      : Error(std::to_string(where.line) + ":" + std::to_string(where.column) + ": " + message),
        where_(where),
        message_(message) {}
  SourceLocation where() const { return where_; }
  const std::string& bare_message() const { return message_; }

 private:
  SourceLocation where_;
  std::string message_;
};

enum class Tok {
  Ident,
  String,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semicolon,
  Colon,
  Dot,
  Neck,      // :-
  Arrow,     // -->
  FatArrow,  // =>
  Bad,
  End,
};

inline const char* token_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semicolon: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Neck: return "':-'";
    case Tok::Arrow: return "'-->'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Bad: return "invalid token";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier name, decoded string body, or error message for Bad
  SourceLocation where;
};

/// Splits UTF-8 text into tokens. `#` starts a comment running to end of
/// line. Strings are double-quoted with backslash escapes; the raw body is
/// kept (escapes intact) so template parsing can distinguish `\{` from `{`.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    Token t;
    t.where = {line, col};
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      advance();
      std::string body;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '"') {
          advance();
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < src.size()) {
          body += d;
          body += src[i + 1];
          advance(2);
          continue;
        }
        body += d;
        advance();
      }
      if (!closed) {
        t.kind = Tok::Bad;
        t.text = "unterminated string literal";
      } else {
        t.kind = Tok::String;
        t.text = std::move(body);
      }
      out.push_back(std::move(t));
      continue;
    }
    auto rest = src.substr(i);
    auto emit = [&](Tok k, std::size_t n) {
      t.kind = k;
      advance(n);
      out.push_back(t);
    };
    if (rest.starts_with(":-")) { emit(Tok::Neck, 2); continue; }
    if (rest.starts_with("-->")) { emit(Tok::Arrow, 3); continue; }
    if (rest.starts_with("=>")) { emit(Tok::FatArrow, 2); continue; }
    switch (c) {
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case '{': emit(Tok::LBrace, 1); continue;
      case '}': emit(Tok::RBrace, 1); continue;
      case '[': emit(Tok::LBracket, 1); continue;
      case ']': emit(Tok::RBracket, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case ';': emit(Tok::Semicolon, 1); continue;
      case ':': emit(Tok::Colon, 1); continue;
      case '.': emit(Tok::Dot, 1); continue;
      default: break;
    }
    t.kind = Tok::Bad;
    t.text = std::string("unexpected character '") + c + "'";
    advance();
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.where = {line, col};
  out.push_back(std::move(end));
  return out;
}

/// Recursive-descent cursor over a token vector. Anonymous variables
/// (`_`-prefixed) are numbered `_1`, `_2`, ... within the current clause
/// scope; call `begin_clause` at each declaration boundary.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(std::string_view name) const { return at(Tok::Ident) && peek().text == name; }
  bool at_end() const { return at(Tok::End); }
  std::size_t position() const { return pos_; }

  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    if (t.kind == Tok::Bad) throw ParseError(t.where, t.text);
    throw ParseError(t.where, what + ", found " + describe(t));
  }

  const Token& expect(Tok k, std::string_view context = {}) {
    if (!at(k)) {
      std::string msg = std::string("expected ") + token_name(k);
      if (!context.empty()) msg += std::string(" ") + std::string(context);
      fail(peek(), msg);
    }
    return next();
  }

  void expect_ident(std::string_view name) {
    if (!at_ident(name)) fail(peek(), "expected '" + std::string(name) + "'");
    next();
  }

  void begin_clause() { anon_ = 0; }

  Term parse_term() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(t, "expected a term");
    next();
    if (is_variable_name(t.text)) {
      if (at(Tok::LParen)) fail(peek(), "variable '" + t.text + "' cannot take arguments");
      if (is_anonymous_name(t.text)) return Term::variable("_" + std::to_string(++anon_));
      return Term::variable(t.text);
    }
    if (!at(Tok::LParen)) return Term::atom(t.text);
    next();
    std::vector<Term> args;
    if (at(Tok::RParen)) fail(peek(), "expected an argument (zero-arity symbols are written without parentheses)");
    for (;;) {
      args.push_back(parse_term());
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      expect(Tok::RParen, "or ',' in argument list");
      break;
    }
    return Term::compound(t.text, std::move(args));
  }

  /// Skip to the end of the current declaration: past the next '.' at brace
  /// depth zero, or past the '}' that closes a brace opened in it.
  void recover(std::size_t decl_start) {
    int depth = 0;
    for (std::size_t k = decl_start; k < pos_ && k < toks_.size(); ++k) {
      if (toks_[k].kind == Tok::LBrace) ++depth;
      if (toks_[k].kind == Tok::RBrace) --depth;
    }
    if (pos_ == decl_start) next();
    while (!at_end()) {
      Tok k = peek().kind;
      next();
      if (k == Tok::LBrace) ++depth;
      if (k == Tok::RBrace && --depth <= 0) return;
      if (k == Tok::Dot && depth <= 0) return;
    }
  }

 private:
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Ident: return "'" + t.text + "'";
      case Tok::String: return "string \"" + t.text + "\"";
      default: return token_name(t.kind);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int anon_ = 0;
};

/// Read one term from `text` (e.g. a command-line argument). Throws
/// ParseError on malformed input or trailing tokens.
inline Term parse_term(std::string_view text) {
  TokenCursor cur(tokenize(text));
  Term t = cur.parse_term();
  if (!cur.at_end()) cur.fail(cur.peek(), "unexpected trailing input");
  return t;
}

/// Read a comma-separated term list, e.g. `a, f(X), g`.
inline std::vector<Term> parse_term_list(std::string_view text) {
  TokenCursor cur(tokenize(text));
  std::vector<Term> out;
  if (cur.at_end()) return out;
  for (;;) {
    out.push_back(cur.parse_term());
    if (cur.at(Tok::Comma)) {
      cur.next();
      continue;
    }
    break;
  }
  if (!cur.at_end()) cur.fail(cur.peek(), "unexpected trailing input");
  return out;
}

}  // namespace talespin
