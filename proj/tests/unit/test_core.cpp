#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "psvf/canonical.hpp"
#include "psvf/errors.hpp"
#include "psvf/expression.hpp"
#include "psvf/field.hpp"
#include "psvf/sigma_scan.hpp"

using namespace psvf;
using Catch::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

double rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

// Independent evaluation of Xf for f = y: the second component of the field.
double second_component(const SmoothField2D& f, Vec2 p) { return f(p).y; }

}  // namespace

TEST_CASE("expressions evaluate and differentiate", "[expression]") {
  const Expression e = Expression::parse("x^2*y - 3*sin(2*pi*x) + exp(y)/2");
  const Vec2 p{0.3, -0.7};
  const double expect = 0.09 * -0.7 - 3 * std::sin(2 * kPi * 0.3) + std::exp(-0.7) / 2;
  CHECK(e.value(p) == Approx(expect).epsilon(1e-14));
  const Jet j = e.jet(p);
  CHECK(j.gx == Approx(2 * 0.3 * -0.7 - 6 * kPi * std::cos(2 * kPi * 0.3)).epsilon(1e-13));
  CHECK(j.gy == Approx(0.09 + std::exp(-0.7) / 2).epsilon(1e-13));
  CHECK(j.hxy == Approx(0.6).epsilon(1e-13));
  CHECK(Expression::parse("2^3^2").value({}) == 512.0);
  CHECK(Expression::parse("-x^2").value({3, 0}) == -9.0);
  CHECK(code_of([] { Expression::parse("x +* 2"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { Expression::parse("foo(x)"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { Expression::parse("(x"); }) == ErrorCode::ParseError);
}

TEST_CASE("field derivatives agree with central differences", "[core]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const char* kind : {"k2", "k4", "inf", "bean"}) {
    const CanonicalFamily fam = CanonicalFamily::make(parse_family(kind));
    const PiecewiseField& z = fam.field();
    for (const SmoothField2D* f : {&z.upper, &z.lower}) {
      for (int i = 0; i < 100; ++i) {
        const Vec2 p{u(gen), u(gen)};
        const Mat2 jac = f->jacobian(p);
        const double h = 1e-6;
        for (int c = 0; c < 2; ++c) {
          const Vec2 d = c == 0 ? Vec2{h, 0} : Vec2{0, h};
          const Vec2 fd = ((*f)(p + d) - (*f)(p - d)) / (2 * h);
          const double scale = std::max(1.0, std::abs(fd.y));
          CHECK(std::abs(jac.m[0][c] - fd.x) <= 1e-6 * std::max(1.0, std::abs(fd.x)));
          CHECK(std::abs(jac.m[1][c] - fd.y) <= 1e-6 * scale);
        }
      }
    }
  }
}

TEST_CASE("region classes match an independent sign table", "[core]") {
  std::mt19937_64 gen(5);
  for (const char* kind : {"k2", "k3", "k5", "inf", "bean"}) {
    const CanonicalFamily fam = CanonicalFamily::make(parse_family(kind), 8);
    const PiecewiseField& z = fam.field();
    std::uniform_real_distribution<double> u(z.domain_min, z.domain_max);
    for (int i = 0; i < 1000; ++i) {
      const Vec2 p{u(gen), 0.0};
      const double xf = second_component(z.upper, p), yf = second_component(z.lower, p);
      const RegionClass r = classify_point(z, p);
      if (std::abs(xf) <= 1e-9 || std::abs(yf) <= 1e-9) {
        CHECK((r == RegionClass::TangencyRegular || r == RegionClass::TangencySingular));
      } else if (xf > 0 && yf > 0) {
        CHECK(r == RegionClass::CrossingPos);
      } else if (xf < 0 && yf < 0) {
        CHECK(r == RegionClass::CrossingNeg);
      } else if (xf < 0) {
        CHECK(r == RegionClass::Sliding);
      } else {
        CHECK(r == RegionClass::Escaping);
      }
      if (r == RegionClass::Sliding || r == RegionClass::Escaping) {
        CHECK(std::abs(dot(z.switching.gradient(p), sliding_field(z, p))) < 1e-9);
      }
    }
  }
}

TEST_CASE("sliding field examples", "[core]") {
  const CanonicalFamily bean_family = CanonicalFamily::make(parse_family("bean"));
  const PiecewiseField& bean = bean_family.field();
  const Vec2 v = sliding_field(bean, {-0.5, 0.0});
  CHECK(v.x == Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(v.y) < 1e-15);
  const CanonicalFamily k2 = CanonicalFamily::make(parse_family("k2"));
  const PiecewiseField& z2 = k2.field();
  CHECK(code_of([&] { sliding_field(z2, {0.25, 0.0}); }) == ErrorCode::UndefinedSliding);
  CHECK(classify_point(z2, {0.25, 0.0}) == RegionClass::CrossingPos);
  CHECK(code_of([&] { classify_point(z2, {0.25, 0.1}); }) == ErrorCode::NotOnSwitchingManifold);
}

TEST_CASE("fold visibility conventions", "[core]") {
  const CanonicalFamily bean_family = CanonicalFamily::make(parse_family("bean"));
  const PiecewiseField& bean = bean_family.field();
  const FoldClass origin = classify_fold(bean, {0, 0});
  CHECK(origin.upper == Visibility::Invisible);
  CHECK(origin.lower == Visibility::Visible);
  CHECK(origin.two_fold == TwoFoldKind::InvisibleVisible);
  const FoldClass edge = classify_fold(bean, {-std::sqrt(0.5), 0});
  CHECK(!edge.upper);
  CHECK(edge.lower == Visibility::Invisible);
  CHECK(!edge.two_fold);
  CHECK(code_of([&] { classify_fold(bean, {0.5, 0}); }) == ErrorCode::NotATangency);
}

TEST_CASE("P_k coefficients are exact", "[canonical]") {
  // Expanded with a computer algebra system.
  const std::vector<std::vector<std::string>> frozen = {
      {"0", "0", "1/4", "0", "-1"},
      {"1/16", "0", "-9/16", "0", "3/2", "0", "-1"},
      {"0", "0", "9/4", "0", "-11/2", "0", "17/4", "0", "-1"},
      {"81/64", "0", "-2961/256", "0", "517/16", "0", "-219/8", "0", "9", "0", "-1"},
      {"0", "0", "100", "0", "-266", "0", "985/4", "0", "-191/2", "0", "65/4", "0", "-1"},
  };
  for (int k = 2; k <= 6; ++k) {
    const auto c = poly_Pk_coefficients(k);
    const auto& want = frozen[static_cast<size_t>(k - 2)];
    REQUIRE(c.size() == want.size());
    for (size_t i = 0; i < c.size(); ++i) CHECK(c[i].str() == want[i]);
    std::mt19937_64 gen(static_cast<unsigned>(k));
    std::uniform_real_distribution<double> u(-k / 2.0, k / 2.0);
    for (int i = 0; i < 50; ++i) {
      const double x = u(gen);
      double v = 0.0, d = 0.0;
      for (size_t n = c.size(); n-- > 0;) v = v * x + rational(want[n]);
      for (size_t n = c.size(); n-- > 1;) d = d * x + static_cast<double>(n) * rational(want[n]);
      CHECK(poly_Pk(k, x, 0) == Approx(v).margin(1e-9 * std::max(1.0, std::abs(v))));
      CHECK(poly_Pk(k, x, 1) == Approx(d).margin(1e-9 * std::max(1.0, std::abs(d))));
    }
  }
  CHECK(code_of([] { poly_Pk(1, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("canonical fields have the stated components", "[canonical]") {
  const CanonicalFamily k2 = CanonicalFamily::make(parse_family("k2"));
  const PiecewiseField& z2 = k2.field();
  const CanonicalFamily inf = CanonicalFamily::make(parse_family("inf"));
  const PiecewiseField& zi = inf.field();
  for (int i = 0; i <= 100; ++i) {
    const double x = -1.0 + 0.02 * i;
    for (double y : {0.0, 0.3, -0.4}) {
      CHECK(std::abs(z2.upper({x, y}).y - (x / 2 - 4 * x * x * x)) <= 1e-12);
      CHECK(z2.upper({x, y}).x == 1.0);
      CHECK(z2.lower({x, y}).x == -1.0);
      CHECK(std::abs(zi.upper({x, y}).y - 2 * std::sin(2 * kPi * x)) <= 1e-12);
    }
  }
}

TEST_CASE("invariant curves are integral curves meeting at the lattice", "[canonical]") {
  for (const char* kind : {"k2", "k3", "k6", "inf"}) {
    const CanonicalFamily fam = CanonicalFamily::make(parse_family(kind), 6);
    const InvariantSet& s = fam.invariant_set();
    const PiecewiseField& z = fam.field();
    const double lo = s.unbounded ? -3.0 : s.x_min, hi = s.unbounded ? 3.0 : s.x_max;
    for (int i = 0; i <= 200; ++i) {
      const double x = lo + (hi - lo) * i / 200.0;
      const double h = 1e-5;
      const double du = (s.upper(x + h) - s.upper(x - h)) / (2 * h);
      const Vec2 vu = z.upper({x, s.upper(x)});
      CHECK(std::abs(du - vu.y / vu.x) <= 1e-6 * std::max(1.0, std::abs(du)));
      const double dl = (s.lower(x + h) - s.lower(x - h)) / (2 * h);
      const Vec2 vl = z.lower({x, s.lower(x)});
      CHECK(std::abs(dl - vl.y / vl.x) <= 1e-6 * std::max(1.0, std::abs(dl)));
      CHECK(s.upper(x) >= -1e-12);
    }
    for (long long id = fam.min_fold(); id <= fam.max_fold(); ++id) {
      const double x = fam.fold_x(id);
      CHECK(std::abs(s.upper(x)) <= 1e-12);
      CHECK(std::abs(s.lower(x)) <= 1e-12);
    }
  }
}

TEST_CASE("tangency table of Z_k", "[canonical]") {
  for (int k = 2; k <= 6; ++k) {
    const CanonicalFamily fam = CanonicalFamily::make({FamilyKind::FiniteK, k});
    const FoldLattice& lat = fam.lattice();
    REQUIRE(lat.folds.size() == static_cast<size_t>(k - 1));
    for (size_t j = 0; j < lat.folds.size(); ++j) {
      CHECK(lat.folds[j] == Approx(static_cast<double>(j + 1) - k / 2.0));
      CHECK(classify_fold(fam.field(), {lat.folds[j], 0}).two_fold == TwoFoldKind::VisibleVisible);
    }
    CHECK(*lat.r0 == (1.0 - k) / 2.0);
    CHECK(*lat.r1 == (k - 1.0) / 2.0);
    const RegionClass c0 = classify_point(fam.field(), {*lat.r0, 0});
    const RegionClass c1 = classify_point(fam.field(), {*lat.r1, 0});
    CHECK((c0 == RegionClass::CrossingPos || c0 == RegionClass::CrossingNeg));
    CHECK((c1 == RegionClass::CrossingPos || c1 == RegionClass::CrossingNeg));
    for (const SigmaSegment& s : sigma_regions(fam.field(), 1000)) {
      CHECK(s.region != RegionClass::Sliding);
      CHECK(s.region != RegionClass::Escaping);
    }
  }
}

TEST_CASE("compartments partition the invariant set", "[canonical]") {
  for (int k = 2; k <= 6; ++k) {
    const CanonicalFamily fam = CanonicalFamily::make({FamilyKind::FiniteK, k});
    const auto comps = fam.compartments();
    REQUIRE(comps.size() == static_cast<size_t>(2 * (k - 1)));
    const InvariantSet& s = fam.invariant_set();
    std::mt19937_64 gen(static_cast<unsigned>(k));
    std::uniform_real_distribution<double> u(s.x_min, s.x_max);
    for (int i = 0; i < 400; ++i) {
      const double x = u(gen);
      for (Side side : {Side::Upper, Side::Lower}) {
        const Vec2 p{x, side == Side::Upper ? s.upper(x) : s.lower(x)};
        int owners = 0;
        long long owner = -1;
        for (const Compartment& c : comps) {
          for (const CompartmentPiece& piece : c.pieces) {
            const bool in = piece.side == side && (piece.lo_closed ? x >= piece.lo : x > piece.lo) &&
                            (piece.hi_closed ? x <= piece.hi : x < piece.hi);
            if (in) {
              ++owners;
              owner = c.index;
            }
          }
        }
        const bool at_fold = fam.fold_at(x, 0.0).has_value();
        CHECK(owners == (at_fold ? 0 : 1));
        if (!at_fold && owners == 1) CHECK(fam.compartment_of(p, side) == owner);
      }
    }
  }
  const CanonicalFamily k3 = CanonicalFamily::make({FamilyKind::FiniteK, 3});
  CHECK(k3.compartment_of({-0.75, poly_Pk(3, -0.75)}, Side::Upper) == 0);
  CHECK(k3.compartment_of({0.1, poly_Pk(3, 0.1)}, Side::Upper) == 1);
  CHECK(k3.compartment_of({0.1, -poly_Pk(3, 0.1)}, Side::Lower) == 2);
  CHECK(k3.compartment_of({0.75, -poly_Pk(3, 0.75)}, Side::Lower) == 3);
  CHECK(code_of([&] { k3.compartment_of({0.1, 0.5}, Side::Upper); }) == ErrorCode::OffInvariantSet);
}

TEST_CASE("bean section is met transversally", "[canonical]") {
  const CanonicalFamily bean = CanonicalFamily::make(parse_family("bean"));
  const Section& k = bean.section();
  CHECK(k.contains({0, 1}));
  CHECK(k.contains({0, 0.5}));
  CHECK(!k.contains({0, 0}));
  CHECK(!k.contains({0, 1.01}));
  for (int i = 1; i <= 100; ++i) CHECK(bean.field().upper({0, i / 100.0}).x != 0.0);
  CHECK(code_of([] { parse_family("k1"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_family("bogus"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fields load from JSON", "[core]") {
  const PiecewiseField z = field_from_json(
      R"({"upper":{"fx":"1","fy":"x/2-4*x^3"},"lower":{"fx":"-1","fy":"x/2-4*x^3"},"switching":"y"})");
  CHECK(z.upper({0.5, 0}).y == Approx(0.25 - 0.5));
  CHECK(classify_fold(z, {0, 0}).two_fold == TwoFoldKind::VisibleVisible);
  CHECK(code_of([] { field_from_json("{"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { field_from_json(R"({"upper":{"fx":"1"}})"); }) == ErrorCode::ParseError);
}
