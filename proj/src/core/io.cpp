#include "psvf/io.hpp"

#include <cstdio>
#include <sstream>

#include "psvf/errors.hpp"
#include "psvf/sigma_scan.hpp"
#include "psvf/symbolic.hpp"

namespace psvf {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json fold_json(const FoldClass& c) {
  json j = json::object();
  j["upper"] = c.upper ? to_string(*c.upper) : "transversal";
  j["lower"] = c.lower ? to_string(*c.lower) : "transversal";
  if (c.two_fold) j["two_fold"] = to_string(*c.two_fold);
  return j;
}

json regions_json(const PiecewiseField& z, int samples) {
  json out = json::array();
  for (const SigmaSegment& s : sigma_regions(z, samples)) {
    out.push_back({{"x0", s.x0}, {"x1", s.x1}, {"region", to_string(s.region)}});
  }
  return out;
}

const char* ending_name(ArcEnd e) {
  switch (e) {
    case ArcEnd::Sigma: return "sigma";
    case ArcEnd::RegionBoundary: return "region_boundary";
    case ArcEnd::SlideStop: return "slide_stop";
    case ArcEnd::TimeLimit: return "time_limit";
  }
  return "?";
}

}  // namespace

std::string trajectory_csv(const Trajectory& g, int per_arc) {
  if (per_arc < 2) throw Error(ErrorCode::InvalidArgument, "at least two samples per arc are required");
  std::string out = "t,x,y,governing\n";
  auto row = [&](double t, Vec2 p, Mode m) {
    out += fmt17(t) + ',' + fmt17(p.x) + ',' + fmt17(p.y) + ',' + to_string(m) + '\n';
  };
  if (g.arcs.empty()) {
    row(g.t_origin, g.origin, Mode::Stationary);
    return out;
  }
  for (const Arc& a : g.arcs) {
    if (a.duration() <= 0.0) continue;
    const Polyline pts = a.sample(per_arc);
    for (int i = 0; i < per_arc; ++i) {
      const double t = i + 1 == per_arc ? a.t1 : a.t0 + (a.t1 - a.t0) * (static_cast<double>(i) / (per_arc - 1));
      row(t, pts[static_cast<size_t>(i)], a.mode);
    }
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,y,governing", 0) != 0) {
    throw Error(ErrorCode::ParseError, "trajectory CSV must start with the header t,x,y,governing");
  }
  struct Row {
    double t;
    Vec2 p;
    Mode m;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[4];
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ls, f[i], ',')) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 4 fields");
    }
    try {
      rows.push_back({std::stod(f[0]), {std::stod(f[1]), std::stod(f[2])}, mode_from_string(f[3])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad number");
    }
    if (rows.size() > 1 && rows.back().t < rows[rows.size() - 2].t) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": time decreases");
    }
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "trajectory CSV has no rows");
  Trajectory g;
  g.origin = rows.front().p;
  g.t_origin = rows.front().t;
  size_t i = 0;
  while (i < rows.size()) {
    size_t j = i + 1;
    while (j < rows.size() && rows[j].m == rows[i].m && rows[j].t > rows[j - 1].t) ++j;
    if (j - i >= 2) {
      std::vector<double> ts;
      Polyline ps;
      for (size_t r = i; r < j; ++r) {
        ts.push_back(rows[r].t);
        ps.push_back(rows[r].p);
      }
      Arc a;
      a.mode = rows[i].m;
      a.t0 = ts.front();
      a.t1 = ts.back();
      a.start = ps.front();
      a.end = ps.back();
      a.ending = j < rows.size() ? ArcEnd::Sigma : ArcEnd::TimeLimit;
      a.curve = std::make_shared<PolylineCurve>(std::move(ts), std::move(ps));
      g.arcs.push_back(std::move(a));
    }
    i = j;
  }
  return g;
}

json trajectory_json(const Trajectory& g) {
  json arcs = json::array();
  for (const Arc& a : g.arcs) {
    arcs.push_back({{"governing", to_string(a.mode)},
                    {"t0", a.t0},
                    {"t1", a.t1},
                    {"start", point_json(a.start)},
                    {"end", point_json(a.end)},
                    {"ending", ending_name(a.ending)}});
  }
  return {{"origin", point_json(g.origin)}, {"t_origin", g.t_origin}, {"arcs", arcs}, {"branch_log", g.branch_log}};
}

json branch_tree_json(const BranchTree& tree) {
  json nodes = json::array(), leaves = json::array();
  for (const BranchNode& n : tree.nodes) {
    json opts = json::array();
    for (Mode m : n.options) opts.push_back(to_string(m));
    nodes.push_back({{"point", point_json(n.point)}, {"t", n.t}, {"depth", n.depth}, {"options", opts}});
  }
  for (const Trajectory& g : tree.leaves) leaves.push_back(trajectory_json(g));
  return {{"root", point_json(tree.root)}, {"t0", tree.t0},           {"horizon", tree.horizon},
          {"depth", tree.depth},           {"truncated", tree.truncated}, {"branch_points", nodes},
          {"leaf_count", tree.leaves.size()}, {"leaves", leaves}};
}

json window_json(const SymbolWindow& w) {
  return {{"alphabet", w.alphabet.str()}, {"offset", w.offset}, {"symbols", w.symbols}, {"text", w.str()}};
}

json pk_coefficients_json(int k) {
  json out = json::array();
  for (const Rational& r : poly_Pk_coefficients(k)) out.push_back(r.str());
  return out;
}

json describe_family(const CanonicalFamily& family) {
  const FamilySpec& spec = family.spec();
  const PiecewiseField& z = family.field();
  json j;
  j["family"] = spec.label();
  const InvariantSet& s = family.invariant_set();
  j["invariant_set"] = {{"x_min", s.x_min}, {"x_max", s.x_max}, {"y_min", s.y_min}, {"y_max", s.y_max},
                        {"unbounded", s.unbounded}};
  j["sigma_regions"] = regions_json(z, 2000);
  if (!family.symbolic()) {
    json tangencies = json::array();
    for (const SigmaTangency& t : sigma_tangencies(z, 4000, 1e-9)) {
      json f = fold_json(t.cls);
      f["point"] = point_json(t.p);
      tangencies.push_back(f);
    }
    j["tangencies"] = tangencies;
    j["section"] = {{"x", 0.0}, {"y_open", 0.0}, {"y_closed", 1.0}};
    return j;
  }
  j["alphabet"] = family.alphabet_size() > 0 ? json(family.alphabet_size()) : json("Z");
  if (spec.kind == FamilyKind::FiniteK) j["P_coefficients"] = pk_coefficients_json(spec.k);
  json folds = json::array();
  for (long long id = family.min_fold(); id <= family.max_fold(); ++id) {
    const Vec2 p{family.fold_x(id), 0.0};
    json f = fold_json(classify_fold(z, p));
    f["id"] = id;
    f["point"] = point_json(p);
    folds.push_back(f);
  }
  j["folds"] = folds;
  json crossing = json::array();
  const FoldLattice& lat = family.lattice();
  for (const auto& r : {lat.r0, lat.r1}) {
    if (!r) continue;
    const Vec2 p{*r, 0.0};
    crossing.push_back({{"point", point_json(p)}, {"region", to_string(classify_point(z, p))}});
  }
  j["crossing_points"] = crossing;
  json comps = json::array();
  for (const Compartment& c : family.compartments()) {
    json pieces = json::array();
    for (const CompartmentPiece& p : c.pieces) {
      pieces.push_back({{"side", to_string(p.side)}, {"lo", p.lo}, {"hi", p.hi}, {"lo_closed", p.lo_closed},
                        {"hi_closed", p.hi_closed}});
    }
    comps.push_back({{"index", c.index},
                     {"start_fold", c.start_fold},
                     {"end_fold", c.end_fold},
                     {"first_leg", to_string(c.first_leg)},
                     {"pieces", pieces},
                     {"successors", family.successors(c.index)}});
  }
  j["compartments"] = comps;
  if (spec.kind == FamilyKind::FiniteK) j["transition_matrix"] = json::parse(sft_matrix(family).json());
  return j;
}

json describe_field(const PiecewiseField& z, int sigma_samples) {
  json tangencies = json::array();
  for (const SigmaTangency& t : sigma_tangencies(z, sigma_samples)) {
    json f = fold_json(t.cls);
    f["point"] = point_json(t.p);
    tangencies.push_back(f);
  }
  return {{"name", z.name},
          {"domain", {z.domain_min, z.domain_max}},
          {"tangencies", tangencies},
          {"sigma_regions", regions_json(z, sigma_samples)}};
}

}  // namespace psvf
