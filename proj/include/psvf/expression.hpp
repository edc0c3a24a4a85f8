#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "psvf/geometry.hpp"

namespace psvf {

/// Second-order jet of a scalar function of (x, y): value, gradient and the
/// symmetric Hessian (xx, xy, yy).
struct Jet {
  double v = 0.0;
  double gx = 0.0, gy = 0.0;
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;

  static Jet constant(double c) { return Jet{c}; }
  static Jet var_x(double x) { return Jet{x, 1.0, 0.0}; }
  static Jet var_y(double y) { return Jet{y, 0.0, 1.0}; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet pow(const Jet& a, const Jet& b);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);

/// Parsed arithmetic expression in the variables x and y.
///
/// Grammar: sums/differences of products/quotients of powers (`^`, right
/// associative) of unary-signed atoms; atoms are numbers, `x`, `y`, `pi`,
/// `e`, parenthesised expressions and calls to sin, cos, tan, exp, log, sqrt.
/// Derivatives come out of the jet evaluation, so they are exact up to
/// rounding.
class Expression {
 public:
  /// Throws Error(ParseError) with the offending column on malformed input.
  static Expression parse(std::string_view text);

  double value(Vec2 p) const;
  Jet jet(Vec2 p) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace psvf
