#include <cctype>

#include "klein/mpoly.hpp"

// One recursive-descent grammar serves both polynomial text (variables
// x, y, z plus tower generators) and scalar element text (generators only):
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('+'|'-')* power
//   power := atom ('^' ('-')? digits)?
//   atom  := digits | identifier | '(' expr ')'
// Division and negative exponents require nonzero scalar operands.

namespace klein {

namespace {

class Parser {
 public:
  Parser(const TowerPtr& t, const std::string& s, bool allow_vars)
      : t_(t), s_(s), allow_vars_(allow_vars) {}

  MPoly run() {
    MPoly v = expr();
    skip();
    if (i_ != s_.size())
      throw error("parse: unexpected character '" + std::string(1, s_[i_]) +
                  "' at position " + std::to_string(i_) + " in: " + s_);
    return v;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }

  MPoly expr() {
    MPoly v = term();
    for (;;) {
      if (eat('+'))
        v += term();
      else if (eat('-'))
        v -= term();
      else
        return v;
    }
  }

  MPoly term() {
    MPoly v = unary();
    for (;;) {
      if (eat('*')) {
        v = v * unary();
      } else if (eat('/')) {
        MPoly d = unary();
        v = v * scalar_of(d, "division").inverse();
      } else {
        return v;
      }
    }
  }

  MPoly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  MPoly power() {
    MPoly b = atom();
    if (eat('^')) {
      bool neg = eat('-');
      long e = digits();
      if (neg) {
        FieldElement inv = scalar_of(b, "negative exponent").inverse();
        return MPoly::scalar(inv).pow(static_cast<unsigned>(e));
      }
      return b.pow(static_cast<unsigned>(e));
    }
    return b;
  }

  MPoly atom() {
    skip();
    if (i_ >= s_.size()) throw error("parse: unexpected end of input: " + s_);
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      MPoly v = expr();
      if (!eat(')')) throw error("parse: missing ')' in: " + s_);
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
      return MPoly::constant(t_, Rat(mpz_class(digit_string())));
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
              s_[i_] == '_'))
        id += s_[i_++];
      if (id == "x" || id == "y" || id == "z") {
        if (!allow_vars_)
          throw error("parse: variable '" + id +
                      "' not allowed in scalar element context");
        return MPoly::variable(t_, id == "x" ? 0 : id == "y" ? 1 : 2);
      }
      return MPoly::scalar(t_->generator(id));
    }
    throw error("parse: unexpected character '" + std::string(1, c) +
                "' in: " + s_);
  }

  std::string digit_string() {
    skip();
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_])))
      throw error("parse: expected digits in: " + s_);
    std::string d;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
      d += s_[i_++];
    return d;
  }

  // Exponents only; numeric literals go through digit_string so that
  // arbitrarily large coefficients survive a round trip.
  long digits() {
    std::string d = digit_string();
    if (d.size() > 9) throw error("parse: exponent out of range in: " + s_);
    return std::stol(d);
  }

  FieldElement scalar_of(const MPoly& p, const char* what) {
    if (p.is_zero()) throw error(std::string("parse: ") + what + " by zero");
    if (p.degree() != 0)
      throw error(std::string("parse: ") + what +
                  " requires a scalar operand");
    return p.leading().second;
  }

  TowerPtr t_;
  const std::string& s_;
  size_t i_ = 0;
  bool allow_vars_;
};

}  // namespace

MPoly parse_poly(const TowerPtr& t, const std::string& text) {
  return Parser(t, text, true).run();
}

FieldElement parse_element(const TowerPtr& tower, const std::string& text) {
  MPoly p = Parser(tower, text, false).run();
  if (p.is_zero()) return tower->zero();
  return p.leading().second;
}

}  // namespace klein
