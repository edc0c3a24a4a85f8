#include <algorithm>
#include <cmath>
#include <random>

#include "psvf/errors.hpp"
#include "psvf/orbit_metric.hpp"
#include "psvf/sigma_scan.hpp"

namespace psvf {

using nlohmann::json;

namespace {

constexpr int kPieceSamples = 256;
constexpr double kHorizon = 50.0;

struct Tangency {
  Vec2 p;
  FoldClass cls;
};

struct Edge {
  int from = 0;
  Mode leg = Mode::Upper;
  int to = -1;
  std::vector<Arc> arcs;
  std::vector<Polyline> pieces;
};

struct Skeleton {
  std::vector<Tangency> tangencies;
  std::vector<Vec2> folds;  // visible-visible two-folds, ascending x
  std::vector<Edge> edges;  // index 2 * fold + (leg == Upper)
};

Edge trace_edge(const PiecewiseField& z, const std::vector<Vec2>& folds, int from, Mode leg, double tol) {
  Edge e;
  e.from = from;
  e.leg = leg;
  bool chosen = false;
  int landed = -1;
  Chooser choose = [&](const Trajectory&, Vec2, double, const std::vector<Mode>&) -> Choice {
    if (chosen) throw Error(ErrorCode::SkeletonMismatch, "branching away from the two-folds");
    chosen = true;
    return {leg, std::nullopt};
  };
  auto done = [&](const Trajectory& tr) {
    const Vec2 q = tr.arcs.back().end;
    for (size_t j = 0; j < folds.size(); ++j) {
      if (distance(q, folds[j]) <= tol) {
        landed = static_cast<int>(j);
        return true;
      }
    }
    return false;
  };
  try {
    const Trajectory tr = simulate(z, folds[static_cast<size_t>(from)], 0.0, kHorizon, choose, done);
    if (landed < 0) return e;
    e.to = landed;
    e.arcs = tr.arcs;
    for (const Arc& a : tr.arcs) e.pieces.push_back(a.sample(kPieceSamples));
    e.pieces.front().front() = folds[static_cast<size_t>(from)];
    e.pieces.back().back() = folds[static_cast<size_t>(landed)];
  } catch (const Error&) {
    e.to = -1;
  }
  return e;
}

Skeleton skeleton_of(const PiecewiseField& z, const EquivalenceOptions& o) {
  Skeleton s;
  for (const SigmaTangency& t : sigma_tangencies(z, o.sigma_samples)) {
    s.tangencies.push_back({t.p, t.cls});
    if (t.cls.two_fold == TwoFoldKind::VisibleVisible) s.folds.push_back(t.p);
  }
  for (size_t i = 0; i < s.folds.size(); ++i) {
    for (Mode leg : {Mode::Lower, Mode::Upper}) s.edges.push_back(trace_edge(z, s.folds, static_cast<int>(i), leg, o.tol));
  }
  return s;
}

json skeleton_json(const Skeleton& s) {
  json folds = json::array(), edges = json::array(), tangencies = json::array();
  for (const Vec2& p : s.folds) folds.push_back({p.x, p.y});
  for (const Tangency& t : s.tangencies) {
    json j{{"x", t.p.x}, {"y", t.p.y}};
    if (t.cls.upper) j["upper"] = to_string(*t.cls.upper);
    if (t.cls.lower) j["lower"] = to_string(*t.cls.lower);
    if (t.cls.two_fold) j["two_fold"] = to_string(*t.cls.two_fold);
    tangencies.push_back(j);
  }
  for (const Edge& e : s.edges) {
    edges.push_back({{"from", e.from}, {"leg", to_string(e.leg)}, {"to", e.to}, {"arcs", e.pieces.size()}});
  }
  return {{"two_folds", folds}, {"edges", edges}, {"tangencies", tangencies}};
}

int sign_along_sigma(const PiecewiseField& z, const SmoothField2D& field, Vec2 p) {
  const Vec2 g = z.switching.gradient(p);
  const double v = dot(field(p), Vec2{g.y, -g.x});
  return v > 1e-12 ? 1 : (v < -1e-12 ? -1 : 0);
}

}  // namespace

json sigma_equivalence_check(const PiecewiseField& a, const PiecewiseField& b, const EquivalenceOptions& o) {
  const Skeleton sa = skeleton_of(a, o), sb = skeleton_of(b, o);
  if (sa.folds.empty()) throw Error(ErrorCode::SkeletonMismatch, "first field has no visible-visible two-fold");
  if (sa.folds.size() != sb.folds.size()) {
    throw Error(ErrorCode::SkeletonMismatch, "visible-visible two-fold counts differ: " + std::to_string(sa.folds.size()) +
                                                 " vs " + std::to_string(sb.folds.size()));
  }
  for (size_t i = 0; i < sa.edges.size(); ++i) {
    const Edge &ea = sa.edges[i], &eb = sb.edges[i];
    if (ea.to != eb.to || ea.pieces.size() != eb.pieces.size()) {
      throw Error(ErrorCode::SkeletonMismatch, std::string("loop structure differs at two-fold ") +
                                                   std::to_string(ea.from) + " leg " + to_string(ea.leg));
    }
    for (size_t k = 0; k < ea.arcs.size(); ++k) {
      if (ea.arcs[k].mode != eb.arcs[k].mode) throw Error(ErrorCode::SkeletonMismatch, "arc fields differ along a loop");
    }
  }

  json checks = json::array();
  auto check = [&](const std::string& name, bool pass, json details) {
    details["name"] = name;
    details["pass"] = pass;
    checks.push_back(details);
  };

  // h on each arc by normalized arc length.
  std::vector<std::vector<ArcLengthMap>> maps;
  double fold_err = 0.0, sigma_err = 0.0;
  int side_violations = 0;
  bool monotone = true;
  for (size_t i = 0; i < sa.edges.size(); ++i) {
    const Edge &ea = sa.edges[i], &eb = sb.edges[i];
    std::vector<ArcLengthMap> m;
    for (size_t k = 0; k < ea.pieces.size(); ++k) {
      m.emplace_back(ea.pieces[k], eb.pieces[k]);
      const ArcLengthMap& h = m.back();
      const Polyline img = h.map_vertices();
      if (k == 0) fold_err = std::max(fold_err, distance(img.front(), sb.folds[static_cast<size_t>(eb.from)]));
      if (k + 1 == ea.pieces.size()) fold_err = std::max(fold_err, distance(img.back(), sb.folds[static_cast<size_t>(eb.to)]));
      for (const Vec2& q : {img.front(), img.back()}) sigma_err = std::max(sigma_err, std::abs(b.switching(q)));
      for (size_t v = 1; v < ea.pieces[k].size(); ++v) monotone = monotone && h.parameter_of_vertex(v) >= h.parameter_of_vertex(v - 1);
      for (size_t v = 1; v + 1 < ea.pieces[k].size(); ++v) {
        const double fa = a.switching(ea.pieces[k][v]), fb = b.switching(img[v]);
        if (std::abs(fa) > o.tol && std::abs(fb) > o.tol && (fa > 0.0) != (fb > 0.0)) ++side_violations;
      }
    }
    maps.push_back(std::move(m));
  }
  check("folds_to_folds", fold_err <= o.tol, {{"max_error", fold_err}, {"tolerance", o.tol}});
  check("sigma_to_sigma", sigma_err <= o.tol && side_violations == 0,
        {{"max_abs_f_of_image", sigma_err}, {"half_plane_violations", side_violations}, {"tolerance", o.tol}});

  int orient_bad = 0;
  for (size_t i = 0; i < sa.folds.size(); ++i) {
    orient_bad += sign_along_sigma(a, a.upper, sa.folds[i]) != sign_along_sigma(b, b.upper, sb.folds[i]);
    orient_bad += sign_along_sigma(a, a.lower, sa.folds[i]) != sign_along_sigma(b, b.lower, sb.folds[i]);
  }
  check("orientation_preserved", monotone && orient_bad == 0, {{"monotone", monotone}, {"fold_direction_mismatches", orient_bad}});

  // Random itineraries: follow the same legs in both fields.
  std::mt19937_64 gen(o.seed);
  int agree = 0;
  double worst_match = 0.0, worst_sym = 0.0;
  json bad;
  const int nf = static_cast<int>(sa.folds.size());
  for (int w = 0; w < o.words; ++w) {
    std::vector<Mode> legs;
    for (int i = 0; i < o.word_length; ++i) legs.push_back(gen() % 2 ? Mode::Upper : Mode::Lower);
    std::vector<long long> syms_a, syms_b;
    Polyline image, path_b;
    auto run = [&](const PiecewiseField& z, const Skeleton& s, std::vector<long long>& syms, bool is_a) {
      int fold = 0;
      for (Mode leg : legs) {
        const size_t idx = static_cast<size_t>(2 * fold + (leg == Mode::Upper ? 1 : 0));
        const Edge e = trace_edge(z, s.folds, fold, leg, o.tol);
        syms.push_back(static_cast<long long>(idx));
        if (e.to < 0) return;
        for (size_t k = 0; k < e.pieces.size(); ++k) {
          if (is_a) {
            const Polyline img = maps[idx][k].map_vertices();
            image.insert(image.end(), img.begin(), img.end());
          } else {
            path_b.insert(path_b.end(), e.pieces[k].begin(), e.pieces[k].end());
          }
        }
        fold = e.to;
      }
    };
    run(a, sa, syms_a, true);
    run(b, sb, syms_b, false);
    const double match = image.empty() || path_b.empty() ? INFINITY : directed_distance(image, path_b);
    worst_match = std::max(worst_match, match);
    if (!image.empty() && !path_b.empty()) worst_sym = std::max(worst_sym, hausdorff(image, path_b));
    if (syms_a == syms_b && match <= o.tol) ++agree;
    else if (bad.is_null()) bad = {{"itinerary_a", syms_a}, {"itinerary_b", syms_b}, {"distance", match}};
  }
  json it{{"words", o.words}, {"length", o.word_length}, {"passed", agree}, {"max_distance_h_gamma_to_gamma_b", worst_match},
          {"max_hausdorff_sampled", worst_sym}, {"tolerance", o.tol},
          {"alphabet", 2 * nf}};
  if (!bad.is_null()) it["counterexample"] = bad;
  check("itineraries_conjugate", agree == o.words, it);

  json report;
  report["field_a"] = a.name;
  report["field_b"] = b.name;
  report["skeleton_a"] = skeleton_json(sa);
  report["skeleton_b"] = skeleton_json(sb);
  report["checks"] = checks;
  bool pass = true;
  for (const json& c : checks) pass = pass && c["pass"].get<bool>();
  report["pass"] = pass;
  report["note"] = "checked at sampling resolution; a pass is numerical evidence";
  return report;
}

std::vector<Polyline> two_fold_loops(const PiecewiseField& z, int sigma_samples) {
  EquivalenceOptions o;
  o.sigma_samples = sigma_samples;
  std::vector<Polyline> out;
  for (const Edge& e : skeleton_of(z, o).edges)
    for (const Polyline& p : e.pieces) out.push_back(p);
  return out;
}

}  // namespace psvf
