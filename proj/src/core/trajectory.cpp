#include "psvf/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "psvf/errors.hpp"

namespace psvf {

namespace {

constexpr double kFoldTol = 1e-9;
constexpr double kNudge = 1e-6;
constexpr int kMaxArcs = 200000;

Vec2 project_to_sigma(const SwitchingFunction& f, Vec2 p) {
  if (f.is_horizontal()) return {p.x, 0.0};
  for (int i = 0; i < 6; ++i) {
    const Vec2 g = f.gradient(p);
    const double n2 = dot(g, g);
    if (n2 == 0.0) break;
    p = p - (f(p) / n2) * g;
  }
  return p;
}

bool has(const std::vector<Mode>& v, Mode m) { return std::find(v.begin(), v.end(), m) != v.end(); }

std::string options_text(const std::vector<Mode>& opts) {
  std::string s;
  for (Mode m : opts) {
    if (!s.empty()) s += ",";
    s += to_string(m);
  }
  return s;
}

std::vector<Mode> options_at(const PiecewiseField& z, Vec2 p, const Tolerances& tol, bool after_stop) {
  const double fv = z.switching(p);
  if (std::abs(fv) > tol.on_sigma) return {fv > 0.0 ? Mode::Upper : Mode::Lower};
  std::vector<Mode> opts = continue_at(z, p, tol);
  if (after_stop && opts.size() > 1) std::erase(opts, Mode::Sliding);
  return opts;
}

void check_progress(const Arc& a, double t) {
  if (a.ending != ArcEnd::TimeLimit && !(a.t1 > t)) {
    throw Error(ErrorCode::EventLocationFailure, std::string("no forward progress along the ") + to_string(a.mode) +
                                                     " field at t=" + std::to_string(t));
  }
}

// Time in [a.t0, a.t1] where the arc's x coordinate reaches x = 0 (x increasing).
double x_zero_time(const Arc& a) {
  if (a.start.x == 0.0) return a.t0;
  if (a.end.x == 0.0) return a.t1;
  double lo = a.t0, hi = a.t1;
  for (int i = 0; i < 300; ++i) {
    const double m = 0.5 * (lo + hi);
    if (m == lo || m == hi) break;
    if (a.at(m).x < 0.0) lo = m;
    else hi = m;
  }
  return std::abs(a.at(lo).x) <= std::abs(a.at(hi).x) ? lo : hi;
}

void require_bean(const CanonicalFamily& bean) {
  if (bean.spec().kind != FamilyKind::Bean) throw Error(ErrorCode::FamilyMismatch, "operation needs the bean field");
}

void require_symbolic(const CanonicalFamily& fam) {
  if (!fam.symbolic()) throw Error(ErrorCode::FamilyMismatch, "operation needs a finite-k or infinite family");
}

}  // namespace

std::vector<Mode> continue_at(const PiecewiseField& z, Vec2 p, const Tolerances& tol) {
  const RegionClass r = classify_point(z, p, tol);
  switch (r) {
    case RegionClass::CrossingPos: return {Mode::Upper};
    case RegionClass::CrossingNeg: return {Mode::Lower};
    case RegionClass::Sliding: return {Mode::Sliding};
    case RegionClass::Escaping: return {Mode::Upper, Mode::Lower, Mode::Sliding};
    case RegionClass::TangencySingular: return {Mode::Stationary};
    case RegionClass::TangencyRegular: break;
  }
  std::vector<Mode> out;
  const double xf = lie_derivative(z.upper, z.switching, p, 1);
  const double yf = lie_derivative(z.lower, z.switching, p, 1);
  if (xf > tol.tangency || (std::abs(xf) <= tol.tangency && lie_derivative(z.upper, z.switching, p, 2) > 0.0)) {
    out.push_back(Mode::Upper);
  }
  if (yf < -tol.tangency || (std::abs(yf) <= tol.tangency && lie_derivative(z.lower, z.switching, p, 2) < 0.0)) {
    out.push_back(Mode::Lower);
  }
  // Z^T is offered when sliding carries the point away into an adjacent
  // sliding or escaping segment.
  const Vec2 g = z.switching.gradient(p);
  const Vec2 along = Vec2{g.y, -g.x} / norm(g);
  for (double s : {1.0, -1.0}) {
    const Vec2 q = project_to_sigma(z.switching, p + (s * kNudge) * along);
    try {
      const RegionClass rq = classify_point(z, q, tol);
      if (rq != RegionClass::Sliding && rq != RegionClass::Escaping) continue;
      if (dot(sliding_field(z, q, tol), q - p) > 0.0) {
        out.push_back(Mode::Sliding);
        break;
      }
    } catch (const Error&) {
    }
  }
  if (out.empty()) out.push_back(Mode::Stationary);
  return out;
}

Arc integrate_local(const PiecewiseField& z, Vec2 p, double dt, std::optional<Mode> mode, double t0,
                    const Tolerances& tol) {
  if (!mode) {
    const std::vector<Mode> opts = options_at(z, p, tol, false);
    if (opts.size() != 1) {
      throw Error(ErrorCode::InvalidArgument, "several continuations (" + options_text(opts) + "); choose one");
    }
    mode = opts.front();
  }
  return flow_for(z).advance(z, *mode, p, t0, dt, {});
}

const Arc* Trajectory::arc_at(double t) const {
  if (arcs.empty() || t < t_begin() || t > t_end()) return nullptr;
  const auto it = std::upper_bound(arcs.begin(), arcs.end(), t, [](double v, const Arc& a) { return v < a.t1; });
  return it == arcs.end() ? &arcs.back() : &*it;
}

Vec2 Trajectory::at(double t) const {
  if (arcs.empty()) {
    if (t != t_origin) throw Error(ErrorCode::InvalidArgument, "time outside the trajectory");
    return origin;
  }
  const Arc* a = arc_at(t);
  if (!a) throw Error(ErrorCode::InvalidArgument, "time " + std::to_string(t) + " outside the trajectory");
  return a->at(t);
}

Trajectory Trajectory::shifted(double dt) const {
  Trajectory out = *this;
  out.t_origin -= dt;
  for (Arc& a : out.arcs) a = a.shifted(-dt);
  return out;
}

double Trajectory::max_junction_gap() const {
  double gap = 0.0;
  for (size_t i = 1; i < arcs.size(); ++i) {
    gap = std::max(gap, distance(arcs[i - 1].end, arcs[i].start));
    gap = std::max(gap, std::abs(arcs[i - 1].t1 - arcs[i].t0));
  }
  if (!arcs.empty()) gap = std::max(gap, distance(origin, arcs.front().start));
  return gap;
}

Polyline Trajectory::sample(double a, double b, int per_arc) const {
  if (arcs.empty()) return {origin};
  a = std::max(a, t_begin());
  b = std::min(b, t_end());
  if (b < a) throw Error(ErrorCode::InvalidArgument, "empty sampling interval");
  std::vector<double> times;
  const int n = std::max(2, static_cast<int>(std::ceil(per_arc * (b - a))));
  for (int i = 0; i <= n; ++i) times.push_back(i == n ? b : a + (b - a) * (static_cast<double>(i) / n));
  for (const Arc& arc : arcs) {
    if (arc.t0 > a && arc.t0 < b) times.push_back(arc.t0);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  Polyline out;
  out.reserve(times.size());
  for (double t : times) out.push_back(at(t));
  return out;
}

Trajectory simulate(const PiecewiseField& z, Vec2 p0, double t0, double t_end, const Chooser& choose,
                    const std::function<bool(const Trajectory&)>& done, const Tolerances& tol) {
  Trajectory tr;
  tr.origin = p0;
  tr.t_origin = t0;
  Vec2 p = p0;
  double t = t0;
  bool after_stop = false;
  const FlowModel& flow = flow_for(z);
  for (int guard = 0; t < t_end; ++guard) {
    if (guard > kMaxArcs) throw Error(ErrorCode::EventLocationFailure, "too many arcs (Zeno behaviour?)");
    const std::vector<Mode> opts = options_at(z, p, tol, after_stop);
    Choice c{opts.front(), std::nullopt};
    if (opts.size() > 1) {
      if (!choose) throw Error(ErrorCode::InvalidArgument, "junction without a chooser");
      c = choose(tr, p, t, opts);
      if (!has(opts, c.mode)) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("continuation ") + to_string(c.mode) + " not available (" + options_text(opts) + ")");
      }
      tr.branch_log.push_back("t=" + std::to_string(t) + " " + to_string(c.mode) + " of {" + options_text(opts) + "}");
    }
    Arc a = flow.advance(z, c.mode, p, t, t_end - t, SlideLimit{c.stop});
    check_progress(a, t);
    tr.arcs.push_back(a);
    if (a.mode == Mode::Stationary || a.ending == ArcEnd::TimeLimit) break;
    p = a.end;
    t = a.t1;
    after_stop = a.ending == ArcEnd::SlideStop;
    if (done && done(tr)) break;
  }
  return tr;
}

BranchTree enumerate_branches(const PiecewiseField& z, Vec2 p0, double horizon, const BranchOptions& opts,
                              double t0) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
  BranchTree tree;
  tree.root = p0;
  tree.t0 = t0;
  tree.horizon = horizon;
  const double t_end = t0 + horizon;
  const FlowModel& flow = flow_for(z);

  std::function<void(Trajectory&, Vec2, double, bool, int, int)> grow = [&](Trajectory& tr, Vec2 p, double t,
                                                                           bool after_stop, int depth, int arcs) {
    if (tree.truncated) return;
    if (arcs > kMaxArcs) throw Error(ErrorCode::EventLocationFailure, "too many arcs (Zeno behaviour?)");
    if (t >= t_end) {
      if (tree.leaves.size() >= opts.max_branches) {
        tree.truncated = true;
        return;
      }
      tree.depth = std::max(tree.depth, depth);
      tree.leaves.push_back(tr);
      return;
    }
    const std::vector<Mode> modes = options_at(z, p, opts.tol, after_stop);
    const bool junction = modes.size() > 1;
    if (junction) tree.nodes.push_back({p, t, modes, depth});
    for (Mode m : modes) {
      std::vector<SlideLimit> limits{SlideLimit{}};
      if (m == Mode::Sliding && junction) {
        for (double s : opts.slide_stops) {
          Vec2 q{s, 0.0};
          if (!z.switching.is_horizontal()) q = project_to_sigma(z.switching, q);
          limits.push_back(SlideLimit{q});
        }
      }
      for (const SlideLimit& lim : limits) {
        Arc a = flow.advance(z, m, p, t, t_end - t, lim);
        if (lim.stop && a.ending != ArcEnd::SlideStop) continue;
        check_progress(a, t);
        tr.arcs.push_back(a);
        if (junction) {
          std::string entry = "t=" + std::to_string(t) + " " + to_string(m) + " of {" + options_text(modes) + "}";
          if (lim.stop) entry += " stop x=" + std::to_string(lim.stop->x);
          tr.branch_log.push_back(entry);
        }
        if (a.mode == Mode::Stationary || a.ending == ArcEnd::TimeLimit) {
          grow(tr, a.end, t_end, false, depth + (junction ? 1 : 0), arcs + 1);
        } else {
          grow(tr, a.end, a.t1, a.ending == ArcEnd::SlideStop, depth + (junction ? 1 : 0), arcs + 1);
        }
        tr.arcs.pop_back();
        if (junction) tr.branch_log.pop_back();
        if (tree.truncated) return;
      }
    }
  };
  Trajectory start;
  start.origin = p0;
  start.t_origin = t0;
  grow(start, p0, t0, false, 0, 0);
  return tree;
}

Trajectory trajectory_from_symbols(const CanonicalFamily& family, const SymbolWindow& w) {
  require_symbolic(family);
  const bool finite = family.spec().kind == FamilyKind::FiniteK;
  const Alphabet expect = finite ? Alphabet::finite(family.alphabet_size()) : Alphabet::integers();
  if (!(w.alphabet == expect)) {
    throw Error(ErrorCode::AlphabetMismatch,
                "window alphabet " + w.alphabet.str() + " does not match family " + family.spec().label());
  }
  if (w.symbols.empty()) throw Error(ErrorCode::InvalidArgument, "empty symbol window");
  for (long long s : w.symbols) {
    if (!family.valid_symbol(s)) throw Error(ErrorCode::InvalidArgument, "symbol " + std::to_string(s) + " out of range");
  }
  for (size_t i = 0; i + 1 < w.symbols.size(); ++i) {
    if (!family.admissible(w.symbols[i], w.symbols[i + 1])) {
      throw InadmissibleWordError(static_cast<long long>(i), w.symbols[i], w.symbols[i + 1]);
    }
  }
  const PiecewiseField& z = family.field();
  Trajectory tr;
  const Compartment first = family.compartment(w.symbols.front());
  tr.origin = {family.fold_x(first.start_fold), 0.0};
  tr.t_origin = static_cast<double>(w.offset);
  Vec2 p = tr.origin;
  double t = tr.t_origin;
  for (long long s : w.symbols) {
    const Compartment c = family.compartment(s);
    const Mode leg = c.first_leg;
    const Trajectory piece = simulate(z, p, t, t + 1.0,
                                      [leg](const Trajectory&, Vec2, double, const std::vector<Mode>&) {
                                        return Choice{leg, std::nullopt};
                                      });
    const Vec2 e = piece.end_point();
    if (std::abs(piece.t_end() - (t + 1.0)) > 1e-9 || std::abs(e.y) > 1e-12 ||
        std::abs(e.x - family.fold_x(c.end_fold)) > kFoldTol) {
      throw Error(ErrorCode::EventLocationFailure, "compartment " + std::to_string(s) + " did not end at its fold");
    }
    tr.arcs.insert(tr.arcs.end(), piece.arcs.begin(), piece.arcs.end());
    tr.branch_log.insert(tr.branch_log.end(), piece.branch_log.begin(), piece.branch_log.end());
    p = e;
    t += 1.0;
  }
  return tr;
}

namespace {

std::optional<long long> symbol_at(const CanonicalFamily& fam, const Trajectory& g, double t, double tol) {
  const Arc* a = g.arc_at(t);
  if (!a) throw Error(ErrorCode::InvalidArgument, "trajectory not defined at t=" + std::to_string(t));
  if (a->mode != Mode::Upper && a->mode != Mode::Lower) {
    throw Error(ErrorCode::OffInvariantSet, "trajectory is not on the invariant set at t=" + std::to_string(t));
  }
  return fam.compartment_of(a->at(t), a->mode == Mode::Upper ? Side::Upper : Side::Lower, tol);
}

}  // namespace

SymbolWindow itinerary(const CanonicalFamily& family, const Trajectory& g, long long lo, long long hi, double tol) {
  require_symbolic(family);
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty itinerary window");
  if (static_cast<double>(lo) < g.t_begin() || static_cast<double>(hi) + 0.5 > g.t_end()) {
    throw Error(ErrorCode::InvalidArgument, "trajectory does not cover the itinerary window");
  }
  SymbolWindow w;
  w.alphabet = family.spec().kind == FamilyKind::FiniteK ? Alphabet::finite(family.alphabet_size()) : Alphabet::integers();
  w.offset = lo;
  for (long long j = lo; j <= hi; ++j) {
    auto s = symbol_at(family, g, static_cast<double>(j), tol);
    if (!s) s = symbol_at(family, g, static_cast<double>(j) + 0.5, tol);
    if (!s) throw Error(ErrorCode::OffInvariantSet, "fold at both t and t+1/2");
    w.symbols.push_back(*s);
  }
  return w;
}

std::vector<double> fold_hit_times(const CanonicalFamily& family, const Trajectory& g) {
  require_symbolic(family);
  std::vector<double> out;
  auto at_fold = [&](Vec2 p) { return std::abs(p.y) <= 1e-12 && family.fold_at(p.x, kFoldTol).has_value(); };
  if (at_fold(g.arcs.empty() ? g.origin : g.arcs.front().start)) out.push_back(g.t_begin());
  for (const Arc& a : g.arcs) {
    if (a.ending == ArcEnd::TimeLimit && !at_fold(a.end)) continue;
    if (at_fold(a.end) && (out.empty() || a.t1 > out.back())) out.push_back(a.t1);
  }
  return out;
}

Trajectory time_one(const Trajectory& g) { return g.shifted(1.0); }
Trajectory time_one_inverse(const Trajectory& g) { return g.shifted(-1.0); }

Trajectory bean_trajectory(const CanonicalFamily& bean, double y0, const std::vector<BeanChoice>& loops,
                           int anchor_beat) {
  require_bean(bean);
  if (!(y0 > 0.0 && y0 <= 1.0)) throw Error(ErrorCode::InvalidArgument, "y0 must lie in (0, 1]");
  if (anchor_beat < 0 || anchor_beat > static_cast<int>(loops.size())) {
    throw Error(ErrorCode::InvalidArgument, "anchor beat out of range");
  }
  const double edge = -std::sqrt(0.5);
  for (const BeanChoice& c : loops) {
    if (c.kind == BeanChoice::Outer) continue;
    if (!(c.u < 0.0 && c.u >= edge - 1e-15)) throw Error(ErrorCode::InvalidArgument, "exit point u must lie in [-1/sqrt2, 0)");
    if (c.kind == BeanChoice::ExitY && c.u <= edge + 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "the end of the escaping segment only allows an exit with X");
    }
  }
  const PiecewiseField& z = bean.field();
  size_t next = 0;
  std::optional<BeanChoice::Kind> pending;
  Chooser choose = [&](const Trajectory&, Vec2 p, double, const std::vector<Mode>& options) -> Choice {
    if (pending) {
      const BeanChoice::Kind k = *pending;
      pending.reset();
      return {k == BeanChoice::ExitX ? Mode::Upper : Mode::Lower, std::nullopt};
    }
    if (next >= loops.size()) throw Error(ErrorCode::InvalidArgument, "ran out of loop choices");
    if (std::abs(p.x) > 1e-12 || !has(options, Mode::Sliding)) {
      throw Error(ErrorCode::EventLocationFailure, "unexpected junction on the bean field");
    }
    const BeanChoice c = loops[next++];
    if (c.kind == BeanChoice::Outer) return {Mode::Lower, std::nullopt};
    if (c.u <= edge + 1e-12) return {Mode::Sliding, std::nullopt};
    pending = c.kind;
    return {Mode::Sliding, Vec2{c.u, 0.0}};
  };
  std::vector<double> hits;
  auto done = [&](const Trajectory& tr) {
    const Arc& a = tr.arcs.back();
    if (a.mode == Mode::Upper && a.start.x < 0.0 && a.end.x >= 0.0) {
      const double th = x_zero_time(a);
      if (a.at(th).y > 0.0) hits.push_back(th);
    }
    return hits.size() >= loops.size();
  };
  const double budget = 10.0 * static_cast<double>(loops.size() + 1);
  Trajectory tr;
  if (loops.empty()) {
    tr.origin = {0.0, y0};
    return tr;
  }
  tr = simulate(z, {0.0, y0}, 0.0, budget, choose, done);
  if (hits.size() < loops.size()) throw Error(ErrorCode::SectionNotReached, "orbit did not return to the section");
  // Cut the last arc at the final section hit.
  Arc& last = tr.arcs.back();
  const double th = hits.back();
  last = flow_for(z).advance(z, last.mode, last.start, last.t0, th - last.t0, {});
  last.end = {0.0, last.end.y};
  if (anchor_beat > 0) tr = tr.shifted(hits[static_cast<size_t>(anchor_beat) - 1]);
  return tr;
}

std::vector<double> section_hits(const CanonicalFamily& bean, const Trajectory& g) {
  require_bean(bean);
  const Section& k = bean.section();
  std::vector<double> out;
  auto add = [&out](double t) {
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  };
  if (g.arcs.empty()) {
    if (k.contains(g.origin)) add(g.t_origin);
    return out;
  }
  for (const Arc& a : g.arcs) {
    if (a.mode != Mode::Upper || a.start.x > 0.0 || a.end.x < 0.0) continue;
    const double t = x_zero_time(a);
    const Vec2 q = a.at(t);
    if (q.y > 0.0 && q.y <= 1.0 + k.tol) add(t);
  }
  return out;
}

double return_time(const CanonicalFamily& bean, const Trajectory& g) {
  for (double t : section_hits(bean, g)) {
    if (t > 1e-9) return t;
  }
  throw Error(ErrorCode::SectionNotReached, "no section hit after t=0; extend the horizon");
}

Trajectory return_map(const CanonicalFamily& bean, const Trajectory& g) { return g.shifted(return_time(bean, g)); }

std::pair<long long, long long> beat_range(const CanonicalFamily& bean, const Trajectory& g) {
  const std::vector<double> hits = section_hits(bean, g);
  long long zero = -1;
  for (size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] <= 1e-9) zero = static_cast<long long>(i);
  }
  if (zero < 0) throw Error(ErrorCode::SectionNotReached, "no section hit at or before t=0");
  return {-zero, static_cast<long long>(hits.size()) - 1 - zero};
}

std::vector<double> beat_times(const CanonicalFamily& bean, const Trajectory& g, long long lo, long long hi) {
  const std::vector<double> hits = section_hits(bean, g);
  const auto [first, last] = beat_range(bean, g);
  if (lo < first || hi > last) throw Error(ErrorCode::SectionNotReached, "beat window exceeds the trajectory");
  std::vector<double> out;
  for (long long j = lo; j <= hi; ++j) out.push_back(hits[static_cast<size_t>(j - first)]);
  return out;
}

RealWindow bean_itinerary(const CanonicalFamily& bean, const Trajectory& g, long long lo, long long hi) {
  RealWindow w;
  w.offset = lo;
  for (double t : beat_times(bean, g, lo, hi)) w.values.push_back(g.at(t).y);
  return w;
}

}  // namespace psvf
