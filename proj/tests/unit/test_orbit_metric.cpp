#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "psvf/canonical.hpp"
#include "psvf/errors.hpp"
#include "psvf/orbit_metric.hpp"
#include "psvf/trajectory.hpp"

using namespace psvf;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Polyline random_points(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Polyline p;
  for (int i = 0; i < n; ++i) p.push_back({u(gen), u(gen)});
  return p;
}

double brute_directed(const Polyline& a, const Polyline& b, bool segments) {
  double worst = 0.0;
  for (const Vec2& p : a) {
    double best = INFINITY;
    if (segments && b.size() > 1) {
      for (size_t i = 0; i + 1 < b.size(); ++i) best = std::min(best, point_segment_distance(p, b[i], b[i + 1]));
    } else {
      for (const Vec2& q : b) best = std::min(best, distance(p, q));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double brute_hausdorff(const Polyline& a, const Polyline& b, bool segments) {
  return std::max(brute_directed(a, b, segments), brute_directed(b, a, segments));
}

SymbolWindow random_word(std::mt19937_64& gen, const CanonicalFamily& fam, long long offset, int len) {
  SymbolWindow w{Alphabet::finite(fam.alphabet_size()), offset, {}};
  w.symbols.push_back(std::uniform_int_distribution<int>(0, fam.alphabet_size() - 1)(gen));
  while (static_cast<int>(w.symbols.size()) < len) {
    const auto next = fam.successors(w.symbols.back());
    w.symbols.push_back(next[std::uniform_int_distribution<size_t>(0, next.size() - 1)(gen)]);
  }
  return w;
}

}  // namespace

TEST_CASE("hausdorff matches the quadratic oracle", "[metric][oracle]") {
  std::mt19937_64 gen(51);
  std::uniform_int_distribution<int> size(1, 120);
  for (int i = 0; i < 100; ++i) {
    const Polyline a = random_points(gen, size(gen)), b = random_points(gen, size(gen));
    CHECK(std::abs(hausdorff(a, b, HausdorffMode::Points) - brute_hausdorff(a, b, false)) <= 1e-12);
    CHECK(std::abs(hausdorff(a, b, HausdorffMode::Polyline) - brute_hausdorff(a, b, true)) <= 1e-12);
    CHECK(std::abs(directed_distance(a, b) - brute_directed(a, b, true)) <= 1e-12);
  }
  CHECK(code_of([] { hausdorff({}, {{0.0, 0.0}}); }) == ErrorCode::EmptyCurve);
}

TEST_CASE("hausdorff is a metric on finite sample sets", "[metric][property]") {
  std::mt19937_64 gen(53);
  for (int i = 0; i < 1000; ++i) {
    const Polyline a = random_points(gen, 12), b = random_points(gen, 9), c = random_points(gen, 15);
    const double ab = hausdorff(a, b, HausdorffMode::Points), ba = hausdorff(b, a, HausdorffMode::Points);
    CHECK(ab == ba);
    CHECK(hausdorff(a, a, HausdorffMode::Points) == 0.0);
    CHECK(ab > 0.0);
    CHECK(hausdorff(a, c, HausdorffMode::Points) <= ab + hausdorff(b, c, HausdorffMode::Points));
  }
}

TEST_CASE("rho partial sums are a metric", "[metric][property]") {
  std::mt19937_64 gen(59);
  const CanonicalFamily fam = CanonicalFamily::make(parse_family("k3"));
  RhoOptions ro;
  ro.samples_per_unit = 64;
  ro.mode = HausdorffMode::Points;
  for (int i = 0; i < 100; ++i) {
    const Trajectory a = trajectory_from_symbols(fam, random_word(gen, fam, -5, 11));
    const Trajectory b = trajectory_from_symbols(fam, random_word(gen, fam, -5, 11));
    const Trajectory c = trajectory_from_symbols(fam, random_word(gen, fam, -5, 11));
    const double ab = rho(fam, a, b, 3, ro).value;
    CHECK(ab == rho(fam, b, a, 3, ro).value);
    CHECK(rho(fam, a, a, 3, ro).value == 0.0);
    CHECK(rho(fam, a, c, 3, ro).value <= ab + rho(fam, b, c, 3, ro).value);
  }
}

TEST_CASE("rho of time-one images is bounded by twice rho plus the tail", "[metric]") {
  std::mt19937_64 gen(61);
  for (const char* kind : {"k2", "k3"}) {
    const CanonicalFamily fam = CanonicalFamily::make(parse_family(kind));
    for (int i = 0; i < 50; ++i) {
      const Trajectory a = trajectory_from_symbols(fam, random_word(gen, fam, -8, 17));
      const Trajectory b = trajectory_from_symbols(fam, random_word(gen, fam, -8, 17));
      const MetricBound r = rho(fam, a, b, 5);
      const MetricBound r1 = rho(fam, time_one(a), time_one(b), 5);
      CHECK(r1.value <= 2.0 * r.value + r.tail);
      CHECK(r.tail == Catch::Approx(fam.diameter() / 16.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("orbits with a common central block are rho-close", "[metric]") {
  const CanonicalFamily fam = CanonicalFamily::make(parse_family("k2"));
  const SymbolWindow w1 = parse_window("0001101000", Alphabet::finite(2), -5);
  const SymbolWindow w2 = parse_window("1101101011", Alphabet::finite(2), -5);
  const Trajectory g1 = trajectory_from_symbols(fam, w1), g2 = trajectory_from_symbols(fam, w2);
  const std::vector<double> d = rho_terms(fam, g1, g2, 2);
  REQUIRE(d.size() == 5);
  for (double v : d) CHECK(v == 0.0);
  const std::vector<double> wide = rho_terms(fam, g1, g2, 3);
  CHECK(wide.front() == 0.0);
  CHECK(wide.back() > 0.0);
}

TEST_CASE("normalize anchors at the latest hit", "[metric]") {
  const CanonicalFamily fam = CanonicalFamily::make(parse_family("k2"));
  const SymbolWindow w = parse_window("01101", Alphabet::finite(2), -2);
  const Trajectory g = trajectory_from_symbols(fam, w).shifted(-0.3);
  const OrbitClass c = normalize(fam, g, -1, 1);
  REQUIRE(c.symbols.has_value());
  CHECK(std::abs(c.representative.at(0.0).y) < 1e-12);
  CHECK(c.symbols->symbols == std::vector<long long>{0, 1, 1});

  const CanonicalFamily bean = CanonicalFamily::make(parse_family("bean"));
  const Trajectory b = bean_trajectory(bean, 0.5, {BeanChoice{}, BeanChoice{BeanChoice::ExitX, -0.4}, BeanChoice{}}, 1)
                           .shifted(0.7);
  const OrbitClass cb = normalize(bean, b, 0, 0);
  REQUIRE(cb.beats.has_value());
  CHECK(bean.section().contains(cb.representative.at(0.0)));

  const CanonicalFamily other = CanonicalFamily::make(parse_family("k3"));
  CHECK(code_of([&] { rho(other, c, c, 1); }) == ErrorCode::FamilyMismatch);
}

TEST_CASE("arc-length correspondence", "[metric]") {
  std::mt19937_64 gen(67);
  for (int i = 0; i < 50; ++i) {
    Polyline a = random_points(gen, 30);
    Polyline b;
    for (const Vec2& p : a) b.push_back(2.0 * p + Vec2{0.5, -1.0});
    const ArcLengthMap h = arc_length_homeomorphism(a, b);
    CHECK(h.length_b() == Catch::Approx(2.0 * h.length_a()).epsilon(1e-12));
    CHECK(h.map_parameter(0.0) == b.front());
    CHECK(distance(h.map_parameter(1.0), b.back()) < 1e-12);
    const Polyline img = h.map_vertices();
    for (size_t j = 0; j < a.size(); ++j) CHECK(distance(img[j], b[j]) < 1e-9);
    for (size_t j = 1; j < a.size(); ++j) CHECK(h.parameter_of_vertex(j) >= h.parameter_of_vertex(j - 1));
  }
  const Polyline seg{{0.0, 0.0}, {1.0, 0.0}, {1.0, 3.0}};
  const Polyline at = point_at_arc_length(seg, {0.0, 0.125, 0.5, 1.0});
  CHECK(distance(at[1], {0.5, 0.0}) < 1e-15);
  CHECK(distance(at[2], {1.0, 1.0}) < 1e-15);
  CHECK(at[3] == seg.back());
  CHECK(code_of([] { arc_length_homeomorphism({{1.0, 1.0}, {1.0, 1.0}}, {{0.0, 0.0}, {1.0, 0.0}}); }) ==
        ErrorCode::DegenerateCurve);
}

TEST_CASE("sigma equivalence between fields", "[metric][equivalence]") {
  const PiecewiseField z2 = field_from_json(read_file(PSVF_TEST_DATA "/z2.json"));
  const CanonicalFamily canon = CanonicalFamily::make(parse_family("k2"));
  for (const char* other : {"z2_scaled.json", "z2_sin_deformed.json"}) {
    const PiecewiseField b = field_from_json(read_file(std::string(PSVF_TEST_DATA "/") + other));
    const nlohmann::json r = sigma_equivalence_check(z2, b);
    INFO(other << ": " << r.dump());
    CHECK(r["pass"].get<bool>());
  }
  CHECK(sigma_equivalence_check(canon.field(), z2)["pass"].get<bool>());
  const PiecewiseField z3 = field_from_json(read_file(PSVF_TEST_DATA "/z3.json"));
  CHECK(code_of([&] { sigma_equivalence_check(z2, z3); }) == ErrorCode::SkeletonMismatch);
}

TEST_CASE("conjugacy report on small samples", "[metric][conjugacy]") {
  ConjugacyOptions o;
  o.samples = 20;
  o.depth = 6;
  for (const char* kind : {"k2", "k3", "inf"}) {
    const nlohmann::json r = verify_conjugacy(CanonicalFamily::make(parse_family(kind)), o);
    INFO(r.dump());
    CHECK(r["pass"].get<bool>());
    CHECK(r["checks"].size() >= 5);
  }
}
