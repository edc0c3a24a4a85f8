#include "psvf/field.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "psvf/errors.hpp"

namespace psvf {

namespace {
constexpr double kFdStep = 1e-6;
constexpr double kFdStep2 = 1e-4;
}  // namespace

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotOnSwitchingManifold: return "NotOnSwitchingManifold";
    case ErrorCode::NotATangency: return "NotATangency";
    case ErrorCode::DegenerateTangency: return "DegenerateTangency";
    case ErrorCode::UndefinedSliding: return "UndefinedSliding";
    case ErrorCode::EventLocationFailure: return "EventLocationFailure";
    case ErrorCode::BranchBudgetExceeded: return "BranchBudgetExceeded";
    case ErrorCode::InadmissibleWord: return "InadmissibleWord";
    case ErrorCode::OffInvariantSet: return "OffInvariantSet";
    case ErrorCode::SectionNotReached: return "SectionNotReached";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::SkeletonMismatch: return "SkeletonMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(Side side) noexcept { return side == Side::Upper ? "upper" : "lower"; }

const char* to_string(RegionClass r) noexcept {
  switch (r) {
    case RegionClass::CrossingPos: return "crossing+";
    case RegionClass::CrossingNeg: return "crossing-";
    case RegionClass::Sliding: return "sliding";
    case RegionClass::Escaping: return "escaping";
    case RegionClass::TangencyRegular: return "tangency-regular";
    case RegionClass::TangencySingular: return "tangency-singular";
  }
  return "?";
}

const char* to_string(Visibility v) noexcept { return v == Visibility::Visible ? "visible" : "invisible"; }

const char* to_string(TwoFoldKind k) noexcept {
  switch (k) {
    case TwoFoldKind::VisibleVisible: return "visible-visible";
    case TwoFoldKind::InvisibleVisible: return "invisible-visible";
    case TwoFoldKind::InvisibleInvisible: return "invisible-invisible";
    case TwoFoldKind::VisibleInvisible: return "visible-invisible";
  }
  return "?";
}

SmoothField2D::SmoothField2D(Side label, ValueFn value, JacobianFn jacobian)
    : label_(label), value_(std::move(value)), jacobian_(std::move(jacobian)) {}

SmoothField2D SmoothField2D::from_expressions(Side label, const Expression& fx, const Expression& fy) {
  return SmoothField2D(
      label, [fx, fy](Vec2 p) { return Vec2{fx.value(p), fy.value(p)}; },
      [fx, fy](Vec2 p) {
        const Jet a = fx.jet(p), b = fy.jet(p);
        Mat2 j;
        j.m = {{{a.gx, a.gy}, {b.gx, b.gy}}};
        return j;
      });
}

Mat2 SmoothField2D::jacobian(Vec2 p) const {
  if (jacobian_) return jacobian_(p);
  const Vec2 dx = (value_({p.x + kFdStep, p.y}) - value_({p.x - kFdStep, p.y})) / (2.0 * kFdStep);
  const Vec2 dy = (value_({p.x, p.y + kFdStep}) - value_({p.x, p.y - kFdStep})) / (2.0 * kFdStep);
  Mat2 j;
  j.m = {{{dx.x, dy.x}, {dx.y, dy.y}}};
  return j;
}

SwitchingFunction::SwitchingFunction(ValueFn value, GradientFn gradient, HessianFn hessian)
    : value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {}

SwitchingFunction SwitchingFunction::horizontal() {
  SwitchingFunction f([](Vec2 p) { return p.y; }, [](Vec2) { return Vec2{0.0, 1.0}; },
                      [](Vec2) { return Hessian2{}; });
  f.horizontal_ = true;
  return f;
}

SwitchingFunction SwitchingFunction::from_expression(const Expression& e) {
  return SwitchingFunction([e](Vec2 p) { return e.value(p); },
                           [e](Vec2 p) {
                             const Jet j = e.jet(p);
                             return Vec2{j.gx, j.gy};
                           },
                           [e](Vec2 p) {
                             const Jet j = e.jet(p);
                             return Hessian2{j.hxx, j.hxy, j.hyy};
                           });
}

Vec2 SwitchingFunction::gradient(Vec2 p) const {
  if (gradient_) return gradient_(p);
  return {(value_({p.x + kFdStep, p.y}) - value_({p.x - kFdStep, p.y})) / (2.0 * kFdStep),
          (value_({p.x, p.y + kFdStep}) - value_({p.x, p.y - kFdStep})) / (2.0 * kFdStep)};
}

Hessian2 SwitchingFunction::hessian(Vec2 p) const {
  if (hessian_) return hessian_(p);
  if (gradient_) {
    const Vec2 gx = (gradient_({p.x + kFdStep, p.y}) - gradient_({p.x - kFdStep, p.y})) / (2.0 * kFdStep);
    const Vec2 gy = (gradient_({p.x, p.y + kFdStep}) - gradient_({p.x, p.y - kFdStep})) / (2.0 * kFdStep);
    return {gx.x, 0.5 * (gx.y + gy.x), gy.y};
  }
  const double h = kFdStep2;
  const double f0 = value_(p);
  const double fxx = (value_({p.x + h, p.y}) - 2.0 * f0 + value_({p.x - h, p.y})) / (h * h);
  const double fyy = (value_({p.x, p.y + h}) - 2.0 * f0 + value_({p.x, p.y - h})) / (h * h);
  const double fxy = (value_({p.x + h, p.y + h}) - value_({p.x + h, p.y - h}) - value_({p.x - h, p.y + h}) +
                      value_({p.x - h, p.y - h})) /
                     (4.0 * h * h);
  return {fxx, fxy, fyy};
}

double lie_derivative(const SmoothField2D& field, const SwitchingFunction& f, Vec2 p, int order) {
  const Vec2 grad = f.gradient(p);
  const Vec2 v = field(p);
  if (order == 1) return dot(grad, v);
  if (order != 2) throw Error(ErrorCode::InvalidArgument, "lie_derivative: order must be 1 or 2");
  // grad(Xf) = H_f X + J_X^T grad f
  const Vec2 grad_xf = f.hessian(p) * v + field.jacobian(p).transpose_times(grad);
  return dot(grad_xf, v);
}

namespace {

void require_on_sigma(const PiecewiseField& z, Vec2 p, const Tolerances& tol) {
  const double fv = z.switching(p);
  if (std::abs(fv) > tol.on_sigma) {
    throw Error(ErrorCode::NotOnSwitchingManifold,
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") has |f| = " +
                    std::to_string(std::abs(fv)) + " > on_sigma_tol");
  }
}

std::optional<Visibility> fold_visibility(const PiecewiseField& z, Side side, Vec2 p) {
  const double second = lie_derivative(z.side(side), z.switching, p, 2);
  if (second == 0.0) return std::nullopt;
  const bool own_half = side == Side::Upper ? second > 0.0 : second < 0.0;
  return own_half ? Visibility::Visible : Visibility::Invisible;
}

}  // namespace

RegionClass classify_point(const PiecewiseField& z, Vec2 p, const Tolerances& tol) {
  require_on_sigma(z, p, tol);
  const double xf = lie_derivative(z.upper, z.switching, p, 1);
  const double yf = lie_derivative(z.lower, z.switching, p, 1);
  const bool x_tangent = std::abs(xf) <= tol.tangency;
  const bool y_tangent = std::abs(yf) <= tol.tangency;
  if (x_tangent || y_tangent) {
    if (x_tangent && y_tangent && fold_visibility(z, Side::Upper, p) == Visibility::Invisible &&
        fold_visibility(z, Side::Lower, p) == Visibility::Invisible) {
      return RegionClass::TangencySingular;
    }
    return RegionClass::TangencyRegular;
  }
  if (xf > 0.0 && yf > 0.0) return RegionClass::CrossingPos;
  if (xf < 0.0 && yf < 0.0) return RegionClass::CrossingNeg;
  if (xf < 0.0) return RegionClass::Sliding;
  return RegionClass::Escaping;
}

FoldClass classify_fold(const PiecewiseField& z, Vec2 p, const Tolerances& tol) {
  require_on_sigma(z, p, tol);
  FoldClass out;
  const bool x_tangent = std::abs(lie_derivative(z.upper, z.switching, p, 1)) <= tol.tangency;
  const bool y_tangent = std::abs(lie_derivative(z.lower, z.switching, p, 1)) <= tol.tangency;
  if (!x_tangent && !y_tangent) throw Error(ErrorCode::NotATangency, "neither field is tangent to the switching manifold here");
  for (Side side : {Side::Upper, Side::Lower}) {
    if (!(side == Side::Upper ? x_tangent : y_tangent)) continue;
    const double second = lie_derivative(z.side(side), z.switching, p, 2);
    if (std::abs(second) <= tol.tangency) {
      throw Error(ErrorCode::DegenerateTangency,
                  std::string("second Lie derivative of the ") + to_string(side) + " field vanishes: not a fold");
    }
    (side == Side::Upper ? out.upper : out.lower) = fold_visibility(z, side, p);
  }
  if (out.upper && out.lower) {
    const bool uv = *out.upper == Visibility::Visible, lv = *out.lower == Visibility::Visible;
    out.two_fold = uv ? (lv ? TwoFoldKind::VisibleVisible : TwoFoldKind::VisibleInvisible)
                      : (lv ? TwoFoldKind::InvisibleVisible : TwoFoldKind::InvisibleInvisible);
  }
  return out;
}

Vec2 sliding_field(const PiecewiseField& z, Vec2 p, const Tolerances& tol) {
  const double xf = lie_derivative(z.upper, z.switching, p, 1);
  const double yf = lie_derivative(z.lower, z.switching, p, 1);
  const double den = yf - xf;
  if (std::abs(den) <= tol.tangency) {
    throw Error(ErrorCode::UndefinedSliding, "sliding field undefined: Yf - Xf vanishes");
  }
  return (yf * z.upper(p) - xf * z.lower(p)) / den;
}

PiecewiseField field_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("field JSON: ") + e.what());
  }
  auto expr = [&](const nlohmann::json& node, const char* key, const std::string& where) {
    if (!node.is_object() || !node.contains(key) || !node[key].is_string()) {
      throw Error(ErrorCode::ParseError, "field JSON: missing string '" + where + "." + key + "'");
    }
    return Expression::parse(node[key].get<std::string>());
  };
  if (!doc.contains("upper") || !doc.contains("lower")) {
    throw Error(ErrorCode::ParseError, "field JSON: 'upper' and 'lower' are required");
  }
  const auto& up = doc["upper"];
  const auto& lo = doc["lower"];
  SwitchingFunction f = SwitchingFunction::horizontal();
  if (doc.contains("switching")) {
    if (!doc["switching"].is_string()) throw Error(ErrorCode::ParseError, "field JSON: 'switching' must be a string");
    const std::string s = doc["switching"].get<std::string>();
    if (s != "y") f = SwitchingFunction::from_expression(Expression::parse(s));
  }
  PiecewiseField z{SmoothField2D::from_expressions(Side::Upper, expr(up, "fx", "upper"), expr(up, "fy", "upper")),
                   SmoothField2D::from_expressions(Side::Lower, expr(lo, "fx", "lower"), expr(lo, "fy", "lower")),
                   std::move(f),
                   nullptr,
                   doc.value("name", std::string("user")),
                   -5.0,
                   5.0};
  if (doc.contains("domain")) {
    const auto& d = doc["domain"];
    if (!d.is_array() || d.size() != 2 || !(d[0].get<double>() < d[1].get<double>())) {
      throw Error(ErrorCode::ParseError, "field JSON: 'domain' must be [xmin, xmax] with xmin < xmax");
    }
    z.domain_min = d[0].get<double>();
    z.domain_max = d[1].get<double>();
  }
  return z;
}

}  // namespace psvf
