#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "syntax.hpp"

namespace capcalc {

namespace detail {

enum class Tok { Ident, LBrace, RBrace, LParen, RParen, LBrack, RBrack, Comma, Colon, Sub, Arrow, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

inline std::vector<Token> lex(std::string_view src, int first_line = 1) {
  std::vector<Token> out;
  int line = first_line, col = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') { ++line; col = 1; }
      else ++col;
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) { bump(1); continue; }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') bump(1);
      continue;
    }
    int l = line, k = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, k});
      bump(j - i);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "<:") { out.push_back({Tok::Sub, "<:", l, k}); bump(2); continue; }
    if (two == "->") { out.push_back({Tok::Arrow, "->", l, k}); bump(2); continue; }
    Tok t;
    switch (c) {
      case '{': t = Tok::LBrace; break;
      case '}': t = Tok::RBrace; break;
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case '[': t = Tok::LBrack; break;
      case ']': t = Tok::RBrack; break;
      case ',': t = Tok::Comma; break;
      case ':': t = Tok::Colon; break;
      case '=': t = Tok::Eq; break;
      default:
        throw ParseError(ErrorKind::ParseError, l, k, std::string("unexpected character '") + c + "'");
    }
    out.push_back({t, std::string(1, c), l, k});
    bump(1);
  }
  out.push_back({Tok::End, "<end of input>", line, col});
  return out;
}

inline bool is_keyword(const std::string& s) {
  return s == "fun" || s == "tfun" || s == "let" || s == "in" || s == "box" || s == "unbox" ||
         s == "all" || s == "cap" || s == "Top" || s == "Box";
}
inline bool is_type_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])) && !is_keyword(s);
}
inline bool is_term_name(const std::string& s) {
  return !s.empty() && !std::isupper(static_cast<unsigned char>(s[0])) && !is_keyword(s);
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }

  [[noreturn]] void error(const std::string& msg, ErrorKind k = ErrorKind::ParseError) const {
    throw ParseError(k, peek().line, peek().col, msg + " (at '" + peek().text + "')");
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) error(std::string("expected ") + what);
    return toks_[pos_++];
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) error("expected '" + std::string(w) + "'");
    ++pos_;
  }
  void expect_end() {
    if (!at(Tok::End)) error("trailing input");
  }

  Var term_name() {
    if (!at(Tok::Ident) || !is_term_name(peek().text)) error("expected a term variable");
    return var(toks_[pos_++].text);
  }
  TVar type_name() {
    if (!at(Tok::Ident) || !is_type_name(peek().text)) error("expected a type variable");
    return tvar_name(toks_[pos_++].text);
  }

  CaptureSet captures() {
    expect(Tok::LBrace, "'{'");
    CaptureSet c;
    if (at(Tok::RBrace)) { ++pos_; return c; }
    for (;;) {
      if (at_word("cap")) { ++pos_; c.add_root(); }
      else c.add(term_name());
      if (at(Tok::Comma)) { ++pos_; continue; }
      expect(Tok::RBrace, "'}' or ','");
      return c;
    }
  }

  Type type() {
    if (at(Tok::LBrace)) {
      auto c = captures();
      return capturing(std::move(c), shape());
    }
    if (at(Tok::LParen)) {
      ++pos_;
      auto t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    return shape_type(shape());
  }

  Shape shape() {
    if (at(Tok::LParen)) {
      ++pos_;
      auto t = type();
      expect(Tok::RParen, "')'");
      if (!t.captures.empty()) error("capturing type where a shape type is expected");
      return t.shape;
    }
    if (at_word("Top")) { ++pos_; return top_shape(); }
    if (at_word("Box")) { ++pos_; return boxed_shape(type()); }
    if (at_word("all")) {
      ++pos_;
      if (at(Tok::LParen)) {
        ++pos_;
        auto x = term_name();
        expect(Tok::Colon, "':'");
        auto p = type();
        expect(Tok::RParen, "')'");
        expect(Tok::Arrow, "'->'");
        return fun_shape(std::move(x), std::move(p), type());
      }
      expect(Tok::LBrack, "'(' or '['");
      auto x = type_name();
      expect(Tok::Sub, "'<:'");
      auto b = shape();
      expect(Tok::RBrack, "']'");
      expect(Tok::Arrow, "'->'");
      return tfun_shape(std::move(x), std::move(b), type());
    }
    if (at(Tok::Ident) && is_type_name(peek().text)) return tvar_shape(type_name());
    error("expected a shape type");
  }

  Term term() {
    if (at_word("fun")) {
      ++pos_;
      expect(Tok::LParen, "'('");
      auto x = term_name();
      expect(Tok::Colon, "':'");
      auto p = type();
      expect(Tok::RParen, "')'");
      return abs_(std::move(x), std::move(p), term());
    }
    if (at_word("tfun")) {
      ++pos_;
      expect(Tok::LBrack, "'['");
      auto x = type_name();
      expect(Tok::Sub, "'<:'");
      auto b = shape();
      expect(Tok::RBrack, "']'");
      return tabs(std::move(x), std::move(b), term());
    }
    if (at_word("let")) {
      ++pos_;
      auto x = term_name();
      expect(Tok::Eq, "'='");
      auto bound = term();
      expect_word("in");
      return let_(std::move(x), std::move(bound), term());
    }
    if (at_word("box")) {
      ++pos_;
      return box_(operand());
    }
    if (at(Tok::LBrace)) {
      auto c = captures();
      expect_word("unbox");
      return unbox_(std::move(c), operand());
    }
    if (at(Tok::LParen)) {
      ++pos_;
      auto t = term();
      expect(Tok::RParen, "')'");
      no_trailing_operand();
      return t;
    }
    auto f = term_name();
    if (at(Tok::LBrack)) {
      ++pos_;
      auto s = shape();
      expect(Tok::RBrack, "']'");
      no_trailing_operand();
      return tapp(std::move(f), std::move(s));
    }
    if (at(Tok::Ident) && is_term_name(peek().text)) {
      auto a = term_name();
      no_trailing_operand();
      return app(std::move(f), std::move(a));
    }
    no_trailing_operand();
    return var_ref(std::move(f));
  }

 private:
  Var operand() {
    if (!at(Tok::Ident) || !is_term_name(peek().text))
      error("operand must be a variable", ErrorKind::MNFViolation);
    return term_name();
  }
  // anything that could start another operand means a nested application
  void no_trailing_operand() const {
    if (at(Tok::LParen) || at(Tok::LBrace) || (at(Tok::Ident) && !at_word("in")))
      error("application operand must be a variable", ErrorKind::MNFViolation);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Term parse_term(std::string_view text) {
  detail::Parser p(detail::lex(text));
  auto t = p.term();
  p.expect_end();
  return t;
}

inline Type parse_type(std::string_view text) {
  detail::Parser p(detail::lex(text));
  auto t = p.type();
  p.expect_end();
  return t;
}

inline Shape parse_shape(std::string_view text) {
  detail::Parser p(detail::lex(text));
  auto s = p.shape();
  p.expect_end();
  return s;
}

inline CaptureSet parse_captures(std::string_view text) {
  detail::Parser p(detail::lex(text));
  auto c = p.captures();
  p.expect_end();
  return c;
}

// One binding per line: `x : T` or `X <: S`.
inline Env parse_env(std::string_view text) {
  Env g;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto toks = detail::lex(line, n);
    if (toks.front().kind == detail::Tok::End) continue;
    detail::Parser p(std::move(toks));
    if (p.at(detail::Tok::Ident) && detail::is_type_name(p.peek().text)) {
      auto x = p.type_name();
      p.expect(detail::Tok::Sub, "'<:'");
      auto s = p.shape();
      p.expect_end();
      g = g.extended(std::move(x), std::move(s));
    } else {
      auto x = p.term_name();
      p.expect(detail::Tok::Colon, "':'");
      auto t = p.type();
      p.expect_end();
      g = g.extended(std::move(x), std::move(t));
    }
  }
  return g;
}

}  // namespace capcalc
