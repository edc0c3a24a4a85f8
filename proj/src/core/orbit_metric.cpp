#include "psvf/orbit_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "psvf/errors.hpp"

namespace psvf {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest distance from a point of `a` to the nearest point of `b`, with `b`
// sorted by x so the scan can stop once the x gap alone exceeds the best.
double directed_points(const Polyline& a, const Polyline& b_sorted) {
  double worst = 0.0;
  for (const Vec2& p : a) {
    const auto mid = std::lower_bound(b_sorted.begin(), b_sorted.end(), p.x,
                                      [](const Vec2& q, double x) { return q.x < x; });
    double best = kInf;
    for (auto it = mid; it != b_sorted.end() && it->x - p.x < best; ++it) best = std::min(best, distance(p, *it));
    for (auto it = mid; it != b_sorted.begin();) {
      --it;
      if (p.x - it->x >= best) break;
      best = std::min(best, distance(p, *it));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

struct Segment {
  Vec2 a, b;
  double cx, half;
};

double directed_segments(const Polyline& a, const std::vector<Segment>& segs, double half_max) {
  double worst = 0.0;
  for (const Vec2& p : a) {
    const auto mid = std::lower_bound(segs.begin(), segs.end(), p.x,
                                      [](const Segment& s, double x) { return s.cx < x; });
    double best = kInf;
    for (auto it = mid; it != segs.end() && it->cx - p.x - half_max < best; ++it) {
      best = std::min(best, point_segment_distance(p, it->a, it->b));
    }
    for (auto it = mid; it != segs.begin();) {
      --it;
      if (p.x - it->cx - half_max >= best) break;
      best = std::min(best, point_segment_distance(p, it->a, it->b));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<Segment> segments_of(const Polyline& c, double& half_max) {
  std::vector<Segment> out;
  half_max = 0.0;
  if (c.size() == 1) out.push_back({c[0], c[0], c[0].x, 0.0});
  for (size_t i = 0; i + 1 < c.size(); ++i) {
    const double cx = 0.5 * (c[i].x + c[i + 1].x);
    const double half = 0.5 * std::abs(c[i + 1].x - c[i].x);
    half_max = std::max(half_max, half);
    out.push_back({c[i], c[i + 1], cx, half});
  }
  std::sort(out.begin(), out.end(), [](const Segment& s, const Segment& t) { return s.cx < t.cx; });
  return out;
}

}  // namespace

double hausdorff(const Polyline& a, const Polyline& b, HausdorffMode mode) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCurve, "Hausdorff distance of an empty sample");
  if (mode == HausdorffMode::Points) {
    Polyline sa = a, sb = b;
    auto by_x = [](const Vec2& p, const Vec2& q) { return p.x < q.x || (p.x == q.x && p.y < q.y); };
    std::sort(sa.begin(), sa.end(), by_x);
    std::sort(sb.begin(), sb.end(), by_x);
    return std::max(directed_points(a, sb), directed_points(b, sa));
  }
  double ha = 0.0, hb = 0.0;
  const std::vector<Segment> sa = segments_of(a, ha), sb = segments_of(b, hb);
  return std::max(directed_segments(a, sb, hb), directed_segments(b, sa, ha));
}

double directed_distance(const Polyline& a, const Polyline& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCurve, "distance to an empty sample");
  double hb = 0.0;
  const std::vector<Segment> sb = segments_of(b, hb);
  return directed_segments(a, sb, hb);
}

OrbitClass normalize(const CanonicalFamily& family, const Trajectory& g, long long lo, long long hi) {
  OrbitClass o;
  o.family = family.spec();
  const std::vector<double> hits =
      family.symbolic() ? fold_hit_times(family, g) : section_hits(family, g);
  double anchor = kInf;
  for (double t : hits)
    if (t <= 1e-9) anchor = t;
  if (anchor == kInf) {
    throw Error(family.symbolic() ? ErrorCode::OffInvariantSet : ErrorCode::SectionNotReached,
                "no anchor hit at or before t=0");
  }
  o.representative = g.shifted(anchor);
  if (family.symbolic()) o.symbols = itinerary(family, o.representative, lo, hi);
  else o.beats = bean_itinerary(family, o.representative, lo, hi);
  return o;
}

std::vector<double> rho_terms(const CanonicalFamily& family, const Trajectory& a, const Trajectory& b, int n,
                              const RhoOptions& opts) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "rho window must be >= 0");
  std::vector<double> d;
  if (family.symbolic()) {
    for (const Trajectory* g : {&a, &b}) {
      if (g->t_begin() > -n || g->t_end() < n + 1) {
        throw Error(ErrorCode::InvalidArgument, "trajectory does not cover the rho window");
      }
    }
    for (int i = -n; i <= n; ++i) {
      d.push_back(hausdorff(a.sample(i, i + 1, opts.samples_per_unit), b.sample(i, i + 1, opts.samples_per_unit),
                            opts.mode));
    }
    return d;
  }
  const std::vector<double> ta = beat_times(family, a, -n, n + 1), tb = beat_times(family, b, -n, n + 1);
  for (size_t i = 0; i + 1 < ta.size(); ++i) {
    d.push_back(hausdorff(a.sample(ta[i], ta[i + 1], opts.samples_per_unit),
                          b.sample(tb[i], tb[i + 1], opts.samples_per_unit), opts.mode));
  }
  return d;
}

MetricBound rho(const CanonicalFamily& family, const Trajectory& a, const Trajectory& b, int n,
                const RhoOptions& opts) {
  const std::vector<double> d = rho_terms(family, a, b, n, opts);
  MetricBound r;
  for (int i = -n; i <= n; ++i) r.value += d[static_cast<size_t>(i + n)] * std::ldexp(1.0, -std::abs(i));
  if (family.spec().kind == FamilyKind::Infinite) {
    // d_{i+1} <= d_i + 4 sqrt5: consecutive unit arcs of one orbit lie in a
    // box of width 2 and height 4/pi.
    const double c = 8.0 * std::sqrt(5.0);
    r.tail = std::ldexp(d.front() + c, -n) + std::ldexp(d.back() + c, -n);
  } else {
    r.tail = family.diameter() * std::ldexp(1.0, 1 - n);
  }
  return r;
}

MetricBound rho(const CanonicalFamily& family, const OrbitClass& a, const OrbitClass& b, int n,
                const RhoOptions& opts) {
  if (!(a.family == family.spec()) || !(b.family == family.spec())) {
    throw Error(ErrorCode::FamilyMismatch, "orbit classes belong to different families");
  }
  return rho(family, a.representative, b.representative, n, opts);
}

// ---------------------------------------------------------------------------
// Arc length

namespace {

std::vector<double> cumulative(const Polyline& c, double& total) {
  std::vector<double> s(c.size(), 0.0);
  for (size_t i = 1; i < c.size(); ++i) s[i] = s[i - 1] + distance(c[i - 1], c[i]);
  total = c.empty() ? 0.0 : s.back();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateCurve, "curve has zero length");
  for (double& v : s) v /= total;
  s.back() = 1.0;
  return s;
}

Vec2 interpolate(const Polyline& c, const std::vector<double>& s, double u) {
  if (u <= 0.0) return c.front();
  if (u >= 1.0) return c.back();
  const auto it = std::upper_bound(s.begin(), s.end(), u);
  const size_t i = static_cast<size_t>(it - s.begin());
  const double w = (u - s[i - 1]) / (s[i] - s[i - 1]);
  return c[i - 1] + w * (c[i] - c[i - 1]);
}

}  // namespace

ArcLengthMap::ArcLengthMap(Polyline a, Polyline b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() < 2 || b_.size() < 2) throw Error(ErrorCode::DegenerateCurve, "curves need at least two points");
  sa_ = cumulative(a_, sa_len_);
  sb_ = cumulative(b_, sb_len_);
}

Vec2 ArcLengthMap::map_parameter(double s) const { return interpolate(b_, sb_, s); }

Polyline ArcLengthMap::map_vertices() const {
  Polyline out;
  out.reserve(a_.size());
  for (double s : sa_) out.push_back(map_parameter(s));
  return out;
}

ArcLengthMap arc_length_homeomorphism(const Polyline& a, const Polyline& b) { return ArcLengthMap(a, b); }

Polyline point_at_arc_length(const Polyline& curve, const std::vector<double>& s) {
  double total = 0.0;
  const std::vector<double> cs = cumulative(curve, total);
  Polyline out;
  for (double u : s) out.push_back(interpolate(curve, cs, u));
  return out;
}

// ---------------------------------------------------------------------------
// Conjugacy report

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  long long pick(const std::vector<long long>& v) {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(gen)];
  }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
};

std::vector<long long> predecessors(const CanonicalFamily& fam, long long s) {
  std::vector<long long> out;
  if (fam.spec().kind == FamilyKind::FiniteK) {
    for (long long m = 0; m < fam.alphabet_size(); ++m)
      if (fam.admissible(m, s)) out.push_back(m);
  } else {
    for (long long m = s - 2; m <= s + 2; ++m)
      if (fam.admissible(m, s)) out.push_back(m);
  }
  return out;
}

SymbolWindow empty_window(const CanonicalFamily& fam, long long offset) {
  SymbolWindow w;
  w.alphabet = fam.spec().kind == FamilyKind::FiniteK ? Alphabet::finite(fam.alphabet_size()) : Alphabet::integers();
  w.offset = offset;
  return w;
}

SymbolWindow random_word(const CanonicalFamily& fam, Rng& rng, long long offset, int length) {
  SymbolWindow w = empty_window(fam, offset);
  const long long first = fam.spec().kind == FamilyKind::FiniteK ? rng.integer(0, fam.alphabet_size() - 1)
                                                                  : rng.integer(-8, 8);
  w.symbols.push_back(first);
  while (static_cast<int>(w.symbols.size()) < length) w.symbols.push_back(rng.pick(fam.successors(w.symbols.back())));
  return w;
}

// Random admissible word on [lo, hi] that agrees with `core` on its indices.
SymbolWindow extend_word(const CanonicalFamily& fam, Rng& rng, const SymbolWindow& core, long long lo, long long hi) {
  std::vector<long long> left;
  long long s = core.symbols.front();
  for (long long j = core.first() - 1; j >= lo; --j) {
    s = rng.pick(predecessors(fam, s));
    left.push_back(s);
  }
  SymbolWindow w = empty_window(fam, lo);
  w.symbols.assign(left.rbegin(), left.rend());
  w.symbols.insert(w.symbols.end(), core.symbols.begin(), core.symbols.end());
  while (w.last() < hi) w.symbols.push_back(rng.pick(fam.successors(w.symbols.back())));
  return w;
}

json window_json(const SymbolWindow& w) { return {{"offset", w.offset}, {"symbols", w.symbols}}; }

json check(const std::string& name, bool pass, json details = json::object()) {
  details["name"] = name;
  details["pass"] = pass;
  return details;
}

json symbolic_report(const CanonicalFamily& fam, const ConjugacyOptions& o) {
  Rng rng(o.seed);
  json checks = json::array();
  const long long half = o.window / 2;

  // Round trip and shift identity on synthesized orbits.
  {
    int ok_round = 0, ok_shift = 0;
    json bad_round, bad_shift;
    for (int i = 0; i < o.samples; ++i) {
      const SymbolWindow w = random_word(fam, rng, -half, o.window);
      const Trajectory g = trajectory_from_symbols(fam, w);
      const SymbolWindow back = itinerary(fam, g, w.first(), w.last());
      if (back == w) ++ok_round;
      else if (bad_round.is_null()) bad_round = {{"word", window_json(w)}, {"itinerary", window_json(back)}};
      const SymbolWindow moved = itinerary(fam, time_one(g), w.first() - 1, w.last() - 1);
      if (moved == restrict_window(shift(w, 1), w.first() - 1, w.last() - 1)) ++ok_shift;
      else if (bad_shift.is_null()) bad_shift = {{"word", window_json(w)}, {"itinerary_T1", window_json(moved)}};
    }
    json a{{"checked", o.samples}, {"passed", ok_round}};
    if (!bad_round.is_null()) a["counterexample"] = bad_round;
    checks.push_back(check("roundtrip_itinerary_synthesis", ok_round == o.samples, a));
    json b{{"checked", o.samples}, {"passed", ok_shift}};
    if (!bad_shift.is_null()) b["counterexample"] = bad_shift;
    checks.push_back(check("shift_identity_samples", ok_shift == o.samples, b));
  }

  // Shift identity and flight time on every branch to the given depth.
  {
    BranchOptions bo;
    bo.max_branches = (std::size_t{1} << std::min(o.depth, 24)) + 1;
    const double x0 = fam.fold_x(0);
    const BranchTree tree = enumerate_branches(fam.field(), {x0, 0.0}, o.depth, bo);
    size_t ok = 0;
    double worst_flight = 0.0;
    json bad;
    for (const Trajectory& leaf : tree.leaves) {
      const SymbolWindow s = itinerary(fam, leaf, 0, o.depth - 1);
      const SymbolWindow t = itinerary(fam, time_one(leaf), -1, o.depth - 2);
      if (t == restrict_window(shift(s, 1), -1, o.depth - 2)) ++ok;
      else if (bad.is_null()) bad = {{"itinerary", window_json(s)}, {"itinerary_T1", window_json(t)}};
      const std::vector<double> hits = fold_hit_times(fam, leaf);
      for (size_t i = 1; i < hits.size(); ++i) worst_flight = std::max(worst_flight, std::abs(hits[i] - hits[i - 1] - 1.0));
    }
    json a{{"depth", o.depth}, {"leaves", tree.leaves.size()}, {"passed", ok}, {"truncated", tree.truncated}};
    if (!bad.is_null()) a["counterexample"] = bad;
    checks.push_back(check("shift_identity_branches", ok == tree.leaves.size() && !tree.truncated, a));
    checks.push_back(check("flight_time", worst_flight < 1e-9,
                           {{"max_deviation", worst_flight}, {"tolerance", 1e-9}, {"leaves", tree.leaves.size()}}));
  }

  // Words are rejected exactly when a transition is forbidden.
  {
    int agree = 0;
    json bad;
    for (int i = 0; i < o.samples; ++i) {
      SymbolWindow w = empty_window(fam, 0);
      for (int j = 0; j < 6; ++j) {
        if (fam.spec().kind == FamilyKind::FiniteK) w.symbols.push_back(rng.integer(0, fam.alphabet_size() - 1));
        else w.symbols.push_back(j == 0 ? rng.integer(-4, 4) : w.symbols.back() + rng.integer(-3, 3));
      }
      std::optional<long long> expect;
      for (size_t j = 0; j + 1 < w.symbols.size() && !expect; ++j)
        if (!fam.admissible(w.symbols[j], w.symbols[j + 1])) expect = static_cast<long long>(j);
      std::optional<long long> got;
      try {
        trajectory_from_symbols(fam, w);
      } catch (const InadmissibleWordError& e) {
        got = e.index();
      }
      if (got == expect) ++agree;
      else if (bad.is_null()) bad = {{"word", window_json(w)}};
    }
    json a{{"checked", o.samples}, {"passed", agree}};
    if (!bad.is_null()) a["counterexample"] = bad;
    checks.push_back(check("rejects_exactly_forbidden_words", agree == o.samples, a));
  }

  // Continuity: orbits sharing the block |j| <= N are rho-close and their
  // itineraries are within the proof bound.
  {
    const int n_max = std::max(1, o.rho_window);
    int ok = 0;
    json bad;
    double worst_ratio = 0.0;
    const int pairs = std::max(1, o.samples / 4);
    RhoOptions ro;
    ro.samples_per_unit = o.per_unit;
    for (int i = 0; i < pairs; ++i) {
      const int n = rng.integer(1, n_max);
      const SymbolWindow core = random_word(fam, rng, -n, 2 * n + 1);
      const long long span = n_max + 3;
      const SymbolWindow w1 = extend_word(fam, rng, core, -span, span);
      const SymbolWindow w2 = extend_word(fam, rng, core, -span, span);
      const Trajectory g1 = trajectory_from_symbols(fam, w1), g2 = trajectory_from_symbols(fam, w2);
      const std::vector<double> d = rho_terms(fam, g1, g2, n, ro);
      const bool rho_zero = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
      const double ds = metric_d(w1, w2).value;
      const double bound = fam.spec().kind == FamilyKind::FiniteK
                               ? static_cast<double>(2 * fam.spec().k - 3) * std::ldexp(1.0, 1 - n)
                               : std::ldexp(1.0, 4 - n);
      worst_ratio = std::max(worst_ratio, ds / bound);
      if (rho_zero && ds <= bound) ++ok;
      else if (bad.is_null()) bad = {{"w1", window_json(w1)}, {"w2", window_json(w2)}, {"N", n}, {"d", ds}, {"bound", bound}};
    }
    json a{{"checked", pairs}, {"passed", ok}, {"max_d_over_bound", worst_ratio}};
    if (!bad.is_null()) a["counterexample"] = bad;
    checks.push_back(check("continuity_of_itinerary", ok == pairs, a));
  }

  // rho(T1 a, T1 b) <= 2 rho(a, b) + tail.
  {
    const int n = std::max(1, o.rho_window);
    const int pairs = std::max(1, o.samples / 4);
    int ok = 0;
    json bad;
    RhoOptions ro;
    ro.samples_per_unit = o.per_unit;
    for (int i = 0; i < pairs; ++i) {
      const SymbolWindow w1 = random_word(fam, rng, -n - 2, 2 * n + 6);
      const SymbolWindow w2 = random_word(fam, rng, -n - 2, 2 * n + 6);
      const Trajectory g1 = trajectory_from_symbols(fam, w1), g2 = trajectory_from_symbols(fam, w2);
      const MetricBound r = rho(fam, g1, g2, n, ro);
      const MetricBound r1 = rho(fam, time_one(g1), time_one(g2), n, ro);
      if (r1.value <= 2.0 * r.value + r.tail) ++ok;
      else if (bad.is_null()) bad = {{"rho", r.value}, {"rho_T1", r1.value}, {"tail", r.tail}};
    }
    json a{{"checked", pairs}, {"passed", ok}, {"window", n}};
    if (!bad.is_null()) a["counterexample"] = bad;
    checks.push_back(check("shift_lipschitz_estimate", ok == pairs, a));
  }
  return checks;
}

std::vector<BeanChoice> random_loops(Rng& rng, int count) {
  const double edge = -std::sqrt(0.5);
  std::vector<BeanChoice> loops;
  for (int i = 0; i < count; ++i) {
    BeanChoice c;
    const int k = rng.integer(0, 2);
    c.kind = k == 0 ? BeanChoice::Outer : (k == 1 ? BeanChoice::ExitX : BeanChoice::ExitY);
    c.u = rng.uniform(edge + 1e-3, -1e-3);
    loops.push_back(c);
  }
  return loops;
}

json bean_report(const CanonicalFamily& bean, const ConjugacyOptions& o) {
  Rng rng(o.seed);
  json checks = json::array();
  const int loops = 2 * o.rho_window + 3;
  const int anchor = o.rho_window + 1;

  // Beat-time and itinerary shift identities for the return map.
  {
    int ok = 0;
    double worst_beat = 0.0, worst_symbol = 0.0;
    bool in_range = true;
    json bad;
    for (int i = 0; i < o.samples; ++i) {
      const double y0 = rng.uniform(1e-3, 1.0);
      const Trajectory g = bean_trajectory(bean, y0, random_loops(rng, loops), anchor);
      const double eta = return_time(bean, g);
      const Trajectory tg = return_map(bean, g);
      const auto [lo, hi] = beat_range(bean, g);
      const std::vector<double> tb = beat_times(bean, g, lo + 1, hi);
      const std::vector<double> tt = beat_times(bean, tg, lo, hi - 1);
      const RealWindow s = bean_itinerary(bean, g, lo, hi), st = bean_itinerary(bean, tg, lo, hi - 1);
      double beat_err = 0.0, sym_err = 0.0;
      for (size_t j = 0; j < tt.size(); ++j) {
        beat_err = std::max(beat_err, std::abs(tt[j] - (tb[j] - eta)));
        sym_err = std::max(sym_err, std::abs(st.values[j] - s.values[j + 1]));
      }
      for (double v : s.values) in_range = in_range && v > 0.0 && v <= 1.0 + 1e-12;
      worst_beat = std::max(worst_beat, beat_err);
      worst_symbol = std::max(worst_symbol, sym_err);
      if (beat_err <= 1e-9 && sym_err <= 1e-9) ++ok;
      else if (bad.is_null()) bad = {{"y0", y0}, {"beat_error", beat_err}, {"symbol_error", sym_err}};
    }
    json a{{"checked", o.samples}, {"passed", ok}, {"max_beat_error", worst_beat}, {"max_symbol_error", worst_symbol},
           {"tolerance", 1e-9}};
    if (!bad.is_null()) a["counterexample"] = bad;
    checks.push_back(check("beat_time_identity", ok == o.samples, a));
    checks.push_back(check("itinerary_in_unit_interval", in_range, {{"checked", o.samples}}));
  }

  // Surjectivity on a grid of targets.
  {
    const int grid = 50;
    int hit = 0;
    json missed = json::array();
    const double edge = std::sqrt(0.5);
    for (int i = 1; i <= grid; ++i) {
      const double target = static_cast<double>(i) / grid;
      BranchOptions bo;
      for (double u : {-std::sqrt(target), -std::sqrt(1.0 - target)})
        if (u < 0.0 && u > -edge) bo.slide_stops.push_back(u);
      const BranchTree tree = enumerate_branches(bean.field(), {0.0, 0.37}, 8.0, bo);
      bool found = false;
      for (const Trajectory& leaf : tree.leaves) {
        for (double t : section_hits(bean, leaf)) {
          if (t <= 1e-9) continue;
          found = found || std::abs(leaf.at(t).y - target) <= 1e-6;
          break;
        }
      }
      if (found) ++hit;
      else missed.push_back(target);
    }
    checks.push_back(check("return_map_onto", hit == grid, {{"grid", grid}, {"hit", hit}, {"missed", missed}}));
  }

  // d(s(g1), s(g2)) <= rho(g1, g2) on nearby orbits.
  {
    int ok = 0;
    json bad;
    double worst = -kInf;
    RhoOptions ro;
    ro.samples_per_unit = o.per_unit;
    const int n = o.rho_window;
    for (int i = 0; i < o.samples; ++i) {
      const double y0 = rng.uniform(0.05, 1.0);
      std::vector<BeanChoice> l1 = random_loops(rng, loops);
      std::vector<BeanChoice> l2 = l1;
      const double eps = std::pow(10.0, -rng.uniform(1.0, 4.0));
      for (BeanChoice& c : l2) c.u = std::clamp(c.u + rng.uniform(-eps, eps), -std::sqrt(0.5) + 1e-4, -1e-4);
      const double y1 = std::clamp(y0 + rng.uniform(-eps, eps), 1e-3, 1.0);
      const Trajectory g1 = bean_trajectory(bean, y0, l1, anchor), g2 = bean_trajectory(bean, y1, l2, anchor);
      const MetricBound r = rho(bean, g1, g2, n, ro);
      const RealWindow s1 = bean_itinerary(bean, g1, -n, n), s2 = bean_itinerary(bean, g2, -n, n);
      double d = 0.0;
      for (int j = -n; j <= n; ++j) {
        d += std::abs(s1.values[static_cast<size_t>(j + n)] - s2.values[static_cast<size_t>(j + n)]) *
             std::ldexp(1.0, -std::abs(j));
      }
      worst = std::max(worst, d - r.value);
      if (d <= r.value + 1e-9) ++ok;
      else if (bad.is_null()) bad = {{"y0", y0}, {"perturbation", eps}, {"d", d}, {"rho", r.value}};
    }
    json a{{"checked", o.samples}, {"passed", ok}, {"max_d_minus_rho", worst}, {"tolerance", 1e-9}};
    if (!bad.is_null()) a["counterexample"] = bad;
    checks.push_back(check("itinerary_dominated_by_rho", ok == o.samples, a));
  }
  return checks;
}

// The pointwise inequality d(s(g1), s(g2)) <= rho(g1, g2) on unrelated
// orbits: recorded, not asserted, since it can fail for distant pairs.
json bean_global_domination(const CanonicalFamily& bean, const ConjugacyOptions& o) {
  Rng rng(o.seed + 1);
  const int loops = 2 * o.rho_window + 3;
  const int anchor = o.rho_window + 1;
  const int n = o.rho_window;
  RhoOptions ro;
  ro.samples_per_unit = o.per_unit;
  int violations = 0;
  double worst = -kInf;
  json example;
  for (int i = 0; i < o.samples; ++i) {
    const double y1 = rng.uniform(0.01, 1.0), y2 = rng.uniform(0.01, 1.0);
    const Trajectory g1 = bean_trajectory(bean, y1, random_loops(rng, loops), anchor);
    const Trajectory g2 = bean_trajectory(bean, y2, random_loops(rng, loops), anchor);
    const MetricBound r = rho(bean, g1, g2, n, ro);
    const RealWindow s1 = bean_itinerary(bean, g1, -n, n), s2 = bean_itinerary(bean, g2, -n, n);
    double d = 0.0;
    for (int j = -n; j <= n; ++j) {
      d += std::abs(s1.values[static_cast<size_t>(j + n)] - s2.values[static_cast<size_t>(j + n)]) *
           std::ldexp(1.0, -std::abs(j));
    }
    if (d - r.value > worst) {
      worst = d - r.value;
      if (d > r.value + 1e-9) example = {{"itinerary_1", s1.values}, {"itinerary_2", s2.values}, {"d", d}, {"rho", r.value}};
    }
    if (d > r.value + 1e-9) ++violations;
  }
  json out{{"name", "itinerary_dominated_by_rho_unrelated_pairs"},
           {"checked", o.samples},
           {"violations", violations},
           {"max_d_minus_rho", worst}};
  if (!example.is_null()) out["counterexample"] = example;
  return out;
}

}  // namespace

json verify_conjugacy(const CanonicalFamily& family, const ConjugacyOptions& opts) {
  if (opts.samples < 1 || opts.depth < 1 || opts.window < 2 || opts.rho_window < 1) {
    throw Error(ErrorCode::InvalidArgument, "samples, depth, window and rho window must be positive");
  }
  json report;
  report["family"] = family.spec().label();
  report["seed"] = opts.seed;
  report["samples"] = opts.samples;
  report["depth"] = opts.depth;
  report["checks"] = family.symbolic() ? symbolic_report(family, opts) : bean_report(family, opts);
  if (!family.symbolic()) report["observations"] = json::array({bean_global_domination(family, opts)});
  bool pass = true;
  for (const json& c : report["checks"]) pass = pass && c["pass"].get<bool>();
  report["pass"] = pass;
  return report;
}

}  // namespace psvf
