#include "psvf/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "psvf/errors.hpp"

namespace psvf {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error(ErrorCode::InvalidArgument, "rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make_rational(__int128 n, __int128 d) {
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  Rational r;
  r.num = checked(n);
  r.den = checked(d);
  return r;
}

// (value, first, second derivative) of a product of linear factors.
struct Jet1 {
  double v, d1, d2;
};

Jet1 times_linear(Jet1 a, double l) {
  return {a.v * l, a.d1 * l + a.v, a.d2 * l + 2.0 * a.d1};
}

std::vector<double> inside_open(const std::vector<double>& pts, double lo, double hi) {
  std::vector<double> out;
  for (double p : pts)
    if (p > lo && p < hi) out.push_back(p);
  return out;
}

std::vector<double> inside_closed(const std::vector<double>& pts, double lo, double hi) {
  std::vector<double> out;
  for (double p : pts)
    if (p >= lo && p <= hi) out.push_back(p);
  return out;
}

std::vector<double> half_integers_open(double lo, double hi) {
  std::vector<double> out;
  for (double m = std::floor(2.0 * lo); m <= std::ceil(2.0 * hi); m += 1.0) {
    const double v = 0.5 * m;
    if (v > lo && v < hi) out.push_back(v);
  }
  return out;
}

std::vector<double> integers_closed(double lo, double hi) {
  std::vector<double> out;
  for (double m = std::ceil(lo); m <= hi; m += 1.0) out.push_back(m);
  return out;
}

double bisect(const std::function<double(double)>& h, double a, double b) {
  double ha = h(a);
  for (int i = 0; i < 300; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double hm = h(m);
    if (hm == 0.0) return m;
    if ((hm > 0.0) == (ha > 0.0)) {
      a = m;
      ha = hm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make_rational(n, d); }

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) {
  return make_rational(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                       static_cast<__int128>(a.den) * b.den);
}
Rational operator-(Rational a, Rational b) { return a + Rational(-b.num, b.den); }
Rational operator*(Rational a, Rational b) {
  return make_rational(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}

std::string FamilySpec::label() const {
  switch (kind) {
    case FamilyKind::FiniteK: return "k" + std::to_string(k);
    case FamilyKind::Infinite: return "inf";
    case FamilyKind::Bean: return "bean";
  }
  return "?";
}

FamilySpec parse_family(const std::string& text) {
  if (text == "inf" || text == "infinite") return {FamilyKind::Infinite, 0};
  if (text == "bean") return {FamilyKind::Bean, 0};
  std::string digits = text;
  if (!digits.empty() && (digits[0] == 'k' || digits[0] == 'K')) digits = digits.substr(1);
  if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const int k = std::stoi(digits);
    if (k >= 2 && k <= 40) return {FamilyKind::FiniteK, k};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + text + "' (expected k2, k3, ..., inf or bean)");
}

double poly_Pk(int k, double x, int order) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "P_k needs k >= 2");
  if (order < 0 || order > 2) throw Error(ErrorCode::InvalidArgument, "P_k derivative order must be 0, 1 or 2");
  const double half = 0.5 * (k - 1);
  Jet1 j{-1.0, 0.0, 0.0};
  j = times_linear(j, x + half);
  j = times_linear(j, x - half);
  for (int i = 1; i <= k - 1; ++i) {
    const double l = x - (i - 0.5 * k);
    j = times_linear(times_linear(j, l), l);
  }
  return order == 0 ? j.v : (order == 1 ? j.d1 : j.d2);
}

std::vector<Rational> poly_Pk_coefficients(int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "P_k needs k >= 2");
  std::vector<Rational> c{Rational(-1)};
  auto times_root = [&c](Rational a) {
    std::vector<Rational> out(c.size() + 1);
    for (size_t i = 0; i < c.size(); ++i) {
      out[i + 1] = out[i + 1] + c[i];
      out[i] = out[i] - c[i] * a;
    }
    c = std::move(out);
  };
  times_root(Rational(1 - k, 2));
  times_root(Rational(k - 1, 2));
  for (int i = 1; i <= k - 1; ++i) {
    times_root(Rational(2 * i - k, 2));
    times_root(Rational(2 * i - k, 2));
  }
  return c;
}

std::vector<Rational> poly_derivative(const std::vector<Rational>& c) {
  std::vector<Rational> d;
  for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * Rational(static_cast<std::int64_t>(i)));
  return d;
}

FoldLattice fold_lattice(const FamilySpec& spec, int window) {
  FoldLattice l;
  if (spec.kind == FamilyKind::FiniteK) {
    l.r0 = 0.5 * (1 - spec.k);
    l.r1 = 0.5 * (spec.k - 1);
    for (int j = 1; j <= spec.k - 1; ++j) l.folds.push_back(j - 0.5 * spec.k);
  } else if (spec.kind == FamilyKind::Infinite) {
    for (int j = -window; j <= window; ++j) l.folds.push_back(j);
  } else {
    throw Error(ErrorCode::FamilyMismatch, "the bean field has no fold lattice");
  }
  return l;
}

double family_profile(const FamilySpec& spec, double x, int order) {
  switch (spec.kind) {
    case FamilyKind::FiniteK: return poly_Pk(spec.k, x, order);
    case FamilyKind::Infinite:
      if (order == 0) return (1.0 - std::cos(2.0 * kPi * x)) / kPi;
      if (order == 1) return 2.0 * std::sin(2.0 * kPi * x);
      return 4.0 * kPi * std::cos(2.0 * kPi * x);
    case FamilyKind::Bean: break;
  }
  throw Error(ErrorCode::FamilyMismatch, "the bean field has no single profile curve");
}

namespace {

SmoothField2D profile_field(Side side, double speed, std::function<double(double, int)> p) {
  return SmoothField2D(
      side, [speed, p](Vec2 q) { return Vec2{speed, p(q.x, 1)}; },
      [p](Vec2 q) {
        Mat2 j;
        j.m = {{{0.0, 0.0}, {p(q.x, 2), 0.0}}};
        return j;
      });
}

PiecewiseField make_field(const FamilySpec& spec, int window) {
  const SwitchingFunction f = SwitchingFunction::horizontal();
  if (spec.kind == FamilyKind::Bean) {
    SmoothField2D up(Side::Upper, [](Vec2 q) { return Vec2{1.0, -2.0 * q.x}; },
                     [](Vec2) {
                       Mat2 j;
                       j.m = {{{0.0, 0.0}, {-2.0, 0.0}}};
                       return j;
                     });
    SmoothField2D lo(Side::Lower, [](Vec2 q) { return Vec2{-2.0, -4.0 * q.x * q.x * q.x + 2.0 * q.x}; },
                     [](Vec2 q) {
                       Mat2 j;
                       j.m = {{{0.0, 0.0}, {-12.0 * q.x * q.x + 2.0, 0.0}}};
                       return j;
                     });
    const double s = std::sqrt(0.5);
    GraphProfile gu{1.0, [](double x) { return -x * x; },
                    [](double a, double b) { return inside_open({0.0}, a, b); },
                    [](double a, double b) { return inside_closed({0.0}, a, b); }};
    GraphProfile gl{-2.0, [](double x) { return 0.5 * x * x * x * x - 0.5 * x * x; },
                    [s](double a, double b) { return inside_open({-s, 0.0, s}, a, b); },
                    [](double a, double b) { return inside_closed({-1.0, 0.0, 1.0}, a, b); }};
    HorizontalSlide slide;
    slide.lo = -s;
    slide.hi = s;
    slide.breaks = {0.0};
    slide.direction = -1.0;
    slide.primitive = [](double x) { return x - 3.0 / std::sqrt(2.0) * std::atan(std::sqrt(2.0) * x); };
    PiecewiseField z{std::move(up), std::move(lo), f, std::make_shared<GraphFlow>(gu, gl, slide), "bean", -2.0, 2.0};
    return z;
  }

  auto p = [spec](double x, int order) { return family_profile(spec, x, order); };
  GraphProfile gu, gl;
  gu.speed = 1.0;
  gl.speed = -1.0;
  gu.g = [p](double x) { return p(x, 0); };
  gl.g = [p](double x) { return -p(x, 0); };
  double dmin, dmax;
  if (spec.kind == FamilyKind::FiniteK) {
    const FoldLattice lat = fold_lattice(spec);
    std::vector<double> zeros{*lat.r0};
    zeros.insert(zeros.end(), lat.folds.begin(), lat.folds.end());
    zeros.push_back(*lat.r1);
    std::vector<double> crit(lat.folds.begin(), lat.folds.end());
    for (size_t i = 0; i + 1 < zeros.size(); ++i) {
      crit.push_back(bisect([p](double x) { return p(x, 1); }, zeros[i], zeros[i + 1]));
    }
    std::sort(crit.begin(), crit.end());
    gu.critical_points = gl.critical_points = [crit](double a, double b) { return inside_open(crit, a, b); };
    gu.zeros = gl.zeros = [zeros](double a, double b) { return inside_closed(zeros, a, b); };
    dmin = *lat.r0 - 1.0;
    dmax = *lat.r1 + 1.0;
  } else {
    gu.critical_points = gl.critical_points = half_integers_open;
    gu.zeros = gl.zeros = integers_closed;
    dmin = -window;
    dmax = window;
  }
  PiecewiseField z{profile_field(Side::Upper, 1.0, p), profile_field(Side::Lower, -1.0, p), f,
                   std::make_shared<GraphFlow>(gu, gl), spec.label(), dmin, dmax};
  return z;
}

}  // namespace

CanonicalFamily::CanonicalFamily(FamilySpec spec, PiecewiseField field, int window)
    : spec_(spec), field_(std::move(field)), window_(window) {}

CanonicalFamily CanonicalFamily::make(const FamilySpec& spec, int window) {
  if (spec.kind == FamilyKind::FiniteK && spec.k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
  CanonicalFamily fam(spec, make_field(spec, window), window);
  InvariantSet& s = fam.set_;
  if (spec.kind == FamilyKind::Bean) {
    s.upper = [](double x) { return 1.0 - x * x; };
    s.lower = [](double x) { return 0.5 * x * x * x * x - 0.5 * x * x; };
    s.x_min = -1.0;
    s.x_max = 1.0;
    s.y_min = -0.125;
    s.y_max = 1.0;
    return fam;
  }
  fam.lattice_ = fold_lattice(spec, window);
  s.upper = [spec](double x) { return family_profile(spec, x, 0); };
  s.lower = [spec](double x) { return -family_profile(spec, x, 0); };
  if (spec.kind == FamilyKind::FiniteK) {
    s.x_min = *fam.lattice_.r0;
    s.x_max = *fam.lattice_.r1;
    double top = 0.0;
    for (double c : fam.field_.flow ? static_cast<const GraphFlow&>(*fam.field_.flow).profile(Side::Upper).critical_points(
                                          s.x_min, s.x_max)
                                    : std::vector<double>{})
      top = std::max(top, poly_Pk(spec.k, c, 0));
    s.y_min = -top;
    s.y_max = top;
  } else {
    s.unbounded = true;
    s.x_min = -window;
    s.x_max = window;
    s.y_min = -2.0 / kPi;
    s.y_max = 2.0 / kPi;
  }
  return fam;
}

int CanonicalFamily::alphabet_size() const {
  return spec_.kind == FamilyKind::FiniteK ? 2 * (spec_.k - 1) : 0;
}

long long CanonicalFamily::min_fold() const {
  if (spec_.kind == FamilyKind::Bean) throw Error(ErrorCode::FamilyMismatch, "the bean field has no fold lattice");
  return spec_.kind == FamilyKind::FiniteK ? 0 : -window_;
}

long long CanonicalFamily::max_fold() const {
  if (spec_.kind == FamilyKind::Bean) throw Error(ErrorCode::FamilyMismatch, "the bean field has no fold lattice");
  return spec_.kind == FamilyKind::FiniteK ? spec_.k - 2 : window_;
}

double CanonicalFamily::fold_x(long long id) const {
  if (id < min_fold() || id > max_fold()) throw Error(ErrorCode::InvalidArgument, "fold id out of range");
  return spec_.kind == FamilyKind::FiniteK ? static_cast<double>(id) + 1.0 - 0.5 * spec_.k : static_cast<double>(id);
}

std::optional<long long> CanonicalFamily::fold_at(double x, double tol) const {
  if (spec_.kind == FamilyKind::Bean) return std::nullopt;
  const double shift = spec_.kind == FamilyKind::FiniteK ? 1.0 - 0.5 * spec_.k : 0.0;
  const double r = std::round(x - shift);
  if (r < min_fold() || r > max_fold()) return std::nullopt;
  const long long id = static_cast<long long>(r);
  if (std::abs(fold_x(id) - x) > tol) return std::nullopt;
  return id;
}

long long CanonicalFamily::compartment_from(long long fold, Mode leg) const {
  if (leg != Mode::Upper && leg != Mode::Lower) throw Error(ErrorCode::InvalidArgument, "compartments start with X or Y");
  if (spec_.kind == FamilyKind::FiniteK) return 2 * fold + (leg == Mode::Upper ? 1 : 0);
  if (spec_.kind == FamilyKind::Infinite) return 2 * fold - (leg == Mode::Upper ? 0 : 1);
  throw Error(ErrorCode::FamilyMismatch, "the bean field has no compartments");
}

bool CanonicalFamily::valid_symbol(long long n) const {
  if (spec_.kind == FamilyKind::FiniteK) return n >= 0 && n < alphabet_size();
  if (spec_.kind == FamilyKind::Infinite) return n >= -2LL * window_ && n <= 2LL * window_ - 1;
  return false;
}

Compartment CanonicalFamily::compartment(long long n) const {
  if (!valid_symbol(n)) throw Error(ErrorCode::InvalidArgument, "no compartment with index " + std::to_string(n));
  Compartment c;
  c.index = n;
  if (spec_.kind == FamilyKind::Infinite) {
    const long long j = n >= 0 ? n / 2 : -((-n + 1) / 2);
    const double a = static_cast<double>(j), b = a + 1.0;
    if (n - 2 * j == 0) {
      c.pieces = {{Side::Upper, a, b, false, false}};
      c.start_fold = j;
      c.end_fold = j + 1;
      c.first_leg = Mode::Upper;
    } else {
      c.pieces = {{Side::Lower, a, b, false, false}};
      c.start_fold = j + 1;
      c.end_fold = j;
      c.first_leg = Mode::Lower;
    }
    return c;
  }
  const int k = spec_.k;
  const double r0 = *lattice_.r0, r1 = *lattice_.r1;
  if (n == 0) {
    c.pieces = {{Side::Lower, r0, fold_x(0), true, false}, {Side::Upper, r0, fold_x(0), true, false}};
    c.start_fold = c.end_fold = 0;
    c.first_leg = Mode::Lower;
  } else if (n == 2 * k - 3) {
    c.pieces = {{Side::Upper, fold_x(k - 2), r1, false, true}, {Side::Lower, fold_x(k - 2), r1, false, true}};
    c.start_fold = c.end_fold = k - 2;
    c.first_leg = Mode::Upper;
  } else if (n % 2 == 1) {
    const long long j = (n - 1) / 2;
    c.pieces = {{Side::Upper, fold_x(j), fold_x(j + 1), false, false}};
    c.start_fold = j;
    c.end_fold = j + 1;
    c.first_leg = Mode::Upper;
  } else {
    const long long j = n / 2;
    c.pieces = {{Side::Lower, fold_x(j - 1), fold_x(j), false, false}};
    c.start_fold = j;
    c.end_fold = j - 1;
    c.first_leg = Mode::Lower;
  }
  return c;
}

std::vector<Compartment> CanonicalFamily::compartments() const {
  std::vector<Compartment> out;
  if (spec_.kind == FamilyKind::Bean) return out;
  const long long lo = spec_.kind == FamilyKind::FiniteK ? 0 : -2LL * window_;
  const long long hi = spec_.kind == FamilyKind::FiniteK ? alphabet_size() - 1 : 2LL * window_ - 1;
  for (long long n = lo; n <= hi; ++n) out.push_back(compartment(n));
  return out;
}

std::vector<long long> CanonicalFamily::successors(long long n) const {
  const Compartment c = compartment(n);
  std::vector<long long> out;
  for (Mode leg : {Mode::Lower, Mode::Upper}) {
    const long long m = compartment_from(c.end_fold, leg);
    if (valid_symbol(m)) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool CanonicalFamily::admissible(long long from, long long to) const {
  if (!valid_symbol(from) || !valid_symbol(to)) return false;
  const auto s = successors(from);
  return std::find(s.begin(), s.end(), to) != s.end();
}

std::optional<long long> CanonicalFamily::compartment_of(Vec2 p, Side side, double tol) const {
  if (spec_.kind == FamilyKind::Bean) throw Error(ErrorCode::FamilyMismatch, "the bean field has no compartments");
  const double expect = side == Side::Upper ? set_.upper(p.x) : set_.lower(p.x);
  const bool in_range = set_.unbounded ? (p.x >= set_.x_min - tol && p.x <= set_.x_max + tol)
                                       : (p.x >= set_.x_min - tol && p.x <= set_.x_max + tol);
  if (!in_range || std::abs(p.y - expect) > tol * std::max(1.0, std::abs(expect))) {
    throw Error(ErrorCode::OffInvariantSet, "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                                ") is not on the invariant set");
  }
  if (std::abs(p.y) <= tol && fold_at(p.x, tol)) return std::nullopt;
  if (spec_.kind == FamilyKind::Infinite) {
    const long long j = static_cast<long long>(std::floor(p.x));
    const long long n = side == Side::Upper ? 2 * j : 2 * j + 1;
    if (!valid_symbol(n)) throw Error(ErrorCode::OffInvariantSet, "point outside the materialized window");
    return n;
  }
  const int k = spec_.k;
  if (p.x < fold_x(0)) return 0;
  if (p.x > fold_x(k - 2)) return 2 * k - 3;
  const long long j = static_cast<long long>(std::floor(p.x - fold_x(0))) + 1;
  return side == Side::Upper ? 2 * j - 1 : 2 * j;
}

std::optional<long long> CanonicalFamily::compartment_of(Vec2 p, double tol) const {
  return compartment_of(p, p.y < 0.0 ? Side::Lower : Side::Upper, tol);
}

std::pair<Vec2, Side> CanonicalFamily::interior_point(long long n) const {
  const Compartment c = compartment(n);
  const CompartmentPiece& piece = c.pieces.front();
  const double x = 0.5 * (piece.lo + piece.hi);
  const double y = piece.side == Side::Upper ? set_.upper(x) : set_.lower(x);
  return {{x, y}, piece.side};
}

double CanonicalFamily::diameter() const { return std::hypot(set_.x_max - set_.x_min, set_.y_max - set_.y_min); }

}  // namespace psvf
