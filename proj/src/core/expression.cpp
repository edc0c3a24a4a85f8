#include "psvf/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "psvf/errors.hpp"

namespace psvf {

Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.gx + b.gx, a.gy + b.gy, a.hxx + b.hxx, a.hxy + b.hxy, a.hyy + b.hyy};
}

Jet operator-(const Jet& a, const Jet& b) {
  return {a.v - b.v, a.gx - b.gx, a.gy - b.gy, a.hxx - b.hxx, a.hxy - b.hxy, a.hyy - b.hyy};
}

Jet operator-(const Jet& a) { return {-a.v, -a.gx, -a.gy, -a.hxx, -a.hxy, -a.hyy}; }

Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.gx * b.v + a.v * b.gx,
          a.gy * b.v + a.v * b.gy,
          a.hxx * b.v + 2.0 * a.gx * b.gx + a.v * b.hxx,
          a.hxy * b.v + a.gx * b.gy + a.gy * b.gx + a.v * b.hxy,
          a.hyy * b.v + 2.0 * a.gy * b.gy + a.v * b.hyy};
}

namespace {

// Chain rule for a scalar function applied to a jet: f(a) with f', f''.
Jet compose(const Jet& a, double f0, double f1, double f2) {
  return {f0,
          f1 * a.gx,
          f1 * a.gy,
          f2 * a.gx * a.gx + f1 * a.hxx,
          f2 * a.gx * a.gy + f1 * a.hxy,
          f2 * a.gy * a.gy + f1 * a.hyy};
}

bool is_constant(const Jet& a) {
  return a.gx == 0.0 && a.gy == 0.0 && a.hxx == 0.0 && a.hxy == 0.0 && a.hyy == 0.0;
}

}  // namespace

Jet operator/(const Jet& a, const Jet& b) {
  const double r = 1.0 / b.v;
  return a * compose(b, r, -r * r, 2.0 * r * r * r);
}

Jet pow(const Jet& a, const Jet& b) {
  if (is_constant(b)) {
    const double c = b.v;
    if (c == 0.0) return Jet::constant(1.0);
    return compose(a, std::pow(a.v, c), c * std::pow(a.v, c - 1.0), c * (c - 1.0) * std::pow(a.v, c - 2.0));
  }
  return exp(b * log(a));
}

Jet sin(const Jet& a) { return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
Jet cos(const Jet& a) { return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
Jet log(const Jet& a) { return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

struct Expression::Node {
  enum class Kind { Number, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Call } kind;
  double number = 0.0;
  std::string function;
  std::vector<std::shared_ptr<const Node>> args;

  Jet eval(Vec2 p) const {
    switch (kind) {
      case Kind::Number: return Jet::constant(number);
      case Kind::VarX: return Jet::var_x(p.x);
      case Kind::VarY: return Jet::var_y(p.y);
      case Kind::Add: return args[0]->eval(p) + args[1]->eval(p);
      case Kind::Sub: return args[0]->eval(p) - args[1]->eval(p);
      case Kind::Mul: return args[0]->eval(p) * args[1]->eval(p);
      case Kind::Div: return args[0]->eval(p) / args[1]->eval(p);
      case Kind::Pow: return pow(args[0]->eval(p), args[1]->eval(p));
      case Kind::Neg: return -args[0]->eval(p);
      case Kind::Call: {
        const Jet a = args[0]->eval(p);
        if (function == "sin") return sin(a);
        if (function == "cos") return cos(a);
        if (function == "tan") return sin(a) / cos(a);
        if (function == "exp") return exp(a);
        if (function == "log") return log(a);
        return sqrt(a);
      }
    }
    return {};
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}, double number = 0.0, std::string fn = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->number = number;
  n->function = std::move(fn);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    auto n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError,
                "expression parse error at column " + std::to_string(pos_ + 1) + ": " + msg + " in \"" +
                    std::string(s_) + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    auto lhs = product();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, {lhs, product()});
      else if (accept('-')) lhs = make(Kind::Sub, {lhs, product()});
      else return lhs;
    }
  }

  NodePtr product() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Kind::Div, {lhs, unary()});
      else return lhs;
    }
  }

  // Unary sign binds looser than '^' so that -x^2 = -(x^2).
  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      if (name == "x") return make(Kind::VarX);
      if (name == "y") return make(Kind::VarY);
      if (name == "pi") return make(Kind::Number, {}, std::numbers::pi);
      if (name == "e") return make(Kind::Number, {}, std::numbers::e);
      if (name == "sin" || name == "cos" || name == "tan" || name == "exp" || name == "log" || name == "sqrt") {
        if (!accept('(')) fail("expected '(' after " + name);
        auto arg = sum();
        if (!accept(')')) fail("expected ')'");
        return make(Kind::Call, {arg}, 0.0, name);
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return make(Kind::Number, {}, v);
  }
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

double Expression::value(Vec2 p) const { return root_->eval(p).v; }

Jet Expression::jet(Vec2 p) const { return root_->eval(p); }

}  // namespace psvf
