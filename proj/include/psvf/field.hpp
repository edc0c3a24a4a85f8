#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "psvf/expression.hpp"
#include "psvf/geometry.hpp"

namespace psvf {

enum class Side { Upper, Lower };

const char* to_string(Side side) noexcept;

struct Tolerances {
  double on_sigma = 1e-9;
  double tangency = 1e-9;
};

/// One smooth planar vector field (X above the switching manifold, Y below).
/// Jacobians are taken from the supplied closed form when present and from
/// central differences (step 1e-6) otherwise.
class SmoothField2D {
 public:
  using ValueFn = std::function<Vec2(Vec2)>;
  using JacobianFn = std::function<Mat2(Vec2)>;

  SmoothField2D(Side label, ValueFn value, JacobianFn jacobian = {});

  static SmoothField2D from_expressions(Side label, const Expression& fx, const Expression& fy);

  Vec2 operator()(Vec2 p) const { return value_(p); }
  Mat2 jacobian(Vec2 p) const;
  Side label() const { return label_; }
  bool has_closed_form_jacobian() const { return static_cast<bool>(jacobian_); }

 private:
  Side label_;
  ValueFn value_;
  JacobianFn jacobian_;
};

struct Hessian2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  Vec2 operator*(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

/// Scalar function f whose zero set is the switching manifold.
class SwitchingFunction {
 public:
  using ValueFn = std::function<double(Vec2)>;
  using GradientFn = std::function<Vec2(Vec2)>;
  using HessianFn = std::function<Hessian2(Vec2)>;

  explicit SwitchingFunction(ValueFn value, GradientFn gradient = {}, HessianFn hessian = {});

  /// f(x, y) = y.
  static SwitchingFunction horizontal();
  static SwitchingFunction from_expression(const Expression& f);

  double operator()(Vec2 p) const { return value_(p); }
  Vec2 gradient(Vec2 p) const;
  Hessian2 hessian(Vec2 p) const;
  /// True when f is exactly y, which lets flows use exact Σ hits.
  bool is_horizontal() const { return horizontal_; }

 private:
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  bool horizontal_ = false;
};

class FlowModel;

/// Z = X on f >= 0, Z = Y on f <= 0.  An optional closed-form flow model
/// (the canonical families carry one) lets the trajectory engine skip numeric
/// integration.
struct PiecewiseField {
  SmoothField2D upper;
  SmoothField2D lower;
  SwitchingFunction switching;
  std::shared_ptr<const FlowModel> flow;
  std::string name;
  /// Abscissa range scanned when Σ is searched for tangencies.
  double domain_min = -5.0;
  double domain_max = 5.0;

  /// Z(q); on Σ itself the upper field is returned.
  Vec2 operator()(Vec2 q) const { return switching(q) >= 0.0 ? upper(q) : lower(q); }
  const SmoothField2D& side(Side s) const { return s == Side::Upper ? upper : lower; }
};

enum class RegionClass { CrossingPos, CrossingNeg, Sliding, Escaping, TangencyRegular, TangencySingular };

const char* to_string(RegionClass r) noexcept;

enum class Visibility { Visible, Invisible };

/// Two-fold pairing, written (upper field, lower field).
enum class TwoFoldKind { VisibleVisible, InvisibleVisible, InvisibleInvisible, VisibleInvisible };

const char* to_string(Visibility v) noexcept;
const char* to_string(TwoFoldKind k) noexcept;

struct FoldClass {
  std::optional<Visibility> upper;  // set when X is tangent at the point
  std::optional<Visibility> lower;  // set when Y is tangent at the point
  std::optional<TwoFoldKind> two_fold;

  bool operator==(const FoldClass&) const = default;
};

/// Xf(p) (order 1) or X^2 f(p) (order 2).
double lie_derivative(const SmoothField2D& field, const SwitchingFunction& f, Vec2 p, int order);

RegionClass classify_point(const PiecewiseField& z, Vec2 p, const Tolerances& tol = {});

/// Visibility follows the convention that a fold is visible when the tangent
/// orbit lies in the field's own half plane: X^2 f > 0 for the upper field,
/// Y^2 f < 0 for the lower one.
FoldClass classify_fold(const PiecewiseField& z, Vec2 p, const Tolerances& tol = {});

/// Filippov convex combination (Yf X - Xf Y) / (Yf - Xf).
Vec2 sliding_field(const PiecewiseField& z, Vec2 p, const Tolerances& tol = {});

/// Loads a field from {"upper": {"fx","fy"}, "lower": {...}, "switching": expr}.
PiecewiseField field_from_json(const std::string& json_text);

}  // namespace psvf
