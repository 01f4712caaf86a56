#include <cctype>
#include <string>
#include <vector>

#include "causalid/expr.hpp"

namespace causalid {

namespace {

enum class Tok {
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Bar, Caret, At, Tilde, Star,
  Number, Ident, End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) return {Tok::End, "", at};
    const char c = text_[pos_];
    switch (c) {
      case '(': ++pos_; return {Tok::LParen, "(", at};
      case ')': ++pos_; return {Tok::RParen, ")", at};
      case '[': ++pos_; return {Tok::LBracket, "[", at};
      case ']': ++pos_; return {Tok::RBracket, "]", at};
      case '{': ++pos_; return {Tok::LBrace, "{", at};
      case '}': ++pos_; return {Tok::RBrace, "}", at};
      case ',': ++pos_; return {Tok::Comma, ",", at};
      case '|': ++pos_; return {Tok::Bar, "|", at};
      case '^': ++pos_; return {Tok::Caret, "^", at};
      case '@': ++pos_; return {Tok::At, "@", at};
      case '~': ++pos_; return {Tok::Tilde, "~", at};
      case '*': ++pos_; return {Tok::Star, "*", at};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      Token t{Tok::Number, text_.substr(pos_, end - pos_), at};
      pos_ = end;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_')) {
        ++end;
      }
      Token t{Tok::Ident, text_.substr(pos_, end - pos_), at};
      pos_ = end;
      return t;
    }
    throw ParseError(ParseError::Kind::Syntax, at,
                     "syntax error at byte " + std::to_string(at) +
                         ": unexpected character '" + std::string(1, c) + "'");
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { cur_ = lex_.next(); }

  ExpressionPtr run() {
    ExpressionPtr e = parse_expr();
    if (cur_.kind != Tok::End) fail({"end of input"});
    return e;
  }

 private:
  Lexer lex_;
  Token cur_;

  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::string msg = "syntax error at byte " + std::to_string(cur_.offset) +
                      ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += expected.size() == 2 ? " or " : ", ";
      msg += "'" + expected[i] + "'";
    }
    const std::string got = cur_.kind == Tok::End ? "end of input"
                                                  : "'" + cur_.text + "'";
    msg += ", got " + got;
    throw ParseError(ParseError::Kind::Syntax, cur_.offset, msg,
                     std::move(expected));
  }

  void expect(Tok kind, const char* spelling) {
    if (cur_.kind != kind) fail({spelling});
    advance();
  }

  bool starts_factor() const {
    return cur_.kind == Tok::Ident || cur_.kind == Tok::Number ||
           cur_.kind == Tok::LParen;
  }

  ExpressionPtr parse_expr() {
    std::vector<ExpressionPtr> factors;
    factors.push_back(parse_factor());
    while (starts_factor()) factors.push_back(parse_factor());
    return make_product(std::move(factors));
  }

  ExpressionPtr parse_factor() {
    if (cur_.kind == Tok::Number) {
      if (cur_.text != "1") fail({"1"});
      advance();
      return expr_one();
    }
    if (cur_.kind == Tok::LParen) {
      advance();
      ExpressionPtr e = parse_expr();
      expect(Tok::RParen, ")");
      return e;
    }
    if (cur_.kind == Tok::Ident) {
      if (cur_.text == "sum_") return parse_sum();
      if (cur_.text == "frac") return parse_frac();
      if (cur_.text == "P") return parse_prob();
    }
    fail({"P", "sum_{", "frac[", "1", "("});
  }

  ExpressionPtr parse_sum() {
    advance();  // sum_
    expect(Tok::LBrace, "{");
    std::set<std::string> range;
    range.insert(parse_ident());
    while (cur_.kind == Tok::Comma) {
      advance();
      range.insert(parse_ident());
    }
    expect(Tok::RBrace, "}");
    expect(Tok::LBracket, "[");
    ExpressionPtr body = parse_expr();
    expect(Tok::RBracket, "]");
    return make_sum(range, std::move(body));
  }

  ExpressionPtr parse_frac() {
    advance();  // frac
    expect(Tok::LBracket, "[");
    ExpressionPtr num = parse_expr();
    expect(Tok::RBracket, "]");
    expect(Tok::LBracket, "[");
    ExpressionPtr den = parse_expr();
    expect(Tok::RBracket, "]");
    return make_fraction(std::move(num), std::move(den));
  }

  ExpressionPtr parse_prob() {
    const std::size_t term_at = cur_.offset;
    advance();  // P
    std::optional<std::string> domain;
    if (cur_.kind == Tok::Caret) {
      advance();
      std::string label = parse_ident();
      if (cur_.kind == Tok::Star) {
        advance();
        label += '*';
      }
      domain = std::move(label);
    }
    std::vector<VariableRef> do_set;
    if (cur_.kind == Tok::LBracket) {
      advance();
      do_set.push_back(parse_ref());
      while (cur_.kind == Tok::Comma) {
        advance();
        do_set.push_back(parse_ref());
      }
      expect(Tok::RBracket, "]");
    }
    expect(Tok::LParen, "(");
    std::vector<VariableRef> outcomes;
    outcomes.push_back(parse_ev());
    while (cur_.kind == Tok::Comma) {
      advance();
      outcomes.push_back(parse_ev());
    }
    std::vector<VariableRef> conditions;
    if (cur_.kind == Tok::Bar) {
      advance();
      conditions.push_back(parse_ev());
      while (cur_.kind == Tok::Comma) {
        advance();
        conditions.push_back(parse_ev());
      }
    }
    expect(Tok::RParen, ")");
    try {
      return expr_prob(make_prob_term(std::move(domain), std::move(do_set),
                                      std::move(outcomes), std::move(conditions)));
    } catch (const ParseError& pe) {
      throw ParseError(ParseError::Kind::Semantic, term_at,
                       "semantic error at byte " + std::to_string(term_at) +
                           ": " + pe.what());
    }
  }

  std::string parse_ident() {
    if (cur_.kind != Tok::Ident) fail({"identifier"});
    std::string name = cur_.text;
    advance();
    return name;
  }

  VariableRef parse_ref() {
    VariableRef r;
    if (cur_.kind == Tok::Tilde) {
      advance();
      r.star = true;
    }
    r.name = parse_ident();
    return r;
  }

  VariableRef parse_ev() {
    VariableRef r = parse_ref();
    if (cur_.kind != Tok::At) return r;
    advance();
    if (cur_.kind == Tok::LParen) {
      advance();
      r.interventions.push_back(parse_ref());
      while (cur_.kind == Tok::Comma) {
        advance();
        r.interventions.push_back(parse_ref());
      }
      expect(Tok::RParen, ")");
    } else {
      r.interventions.push_back(parse_ref());
    }
    return r;
  }
};

}  // namespace

ExpressionPtr parse(const std::string& text) { return Parser(text).run(); }

}  // namespace causalid
