#include "psvf/flow.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "psvf/errors.hpp"

namespace psvf {

const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Upper: return "upper";
    case Mode::Lower: return "lower";
    case Mode::Sliding: return "sliding";
    case Mode::Stationary: return "stationary";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "upper" || s == "X") return Mode::Upper;
  if (s == "lower" || s == "Y") return Mode::Lower;
  if (s == "sliding" || s == "ZT") return Mode::Sliding;
  if (s == "stationary") return Mode::Stationary;
  throw Error(ErrorCode::ParseError, "unknown governing field '" + s + "'");
}

Vec2 Arc::at(double t) const {
  if (t <= t0) return start;
  if (t >= t1) return end;
  return curve ? curve->at(t) : start;
}

Polyline Arc::sample(int n) const {
  if (n < 2) n = 2;
  Polyline out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = i == n - 1 ? t1 : t0 + (t1 - t0) * (static_cast<double>(i) / (n - 1));
    out.push_back(at(t));
  }
  return out;
}

namespace {

class ShiftedCurve : public ArcCurve {
 public:
  ShiftedCurve(std::shared_ptr<const ArcCurve> base, double shift) : base_(std::move(base)), shift_(shift) {}
  Vec2 at(double t) const override { return base_->at(t - shift_); }

 private:
  std::shared_ptr<const ArcCurve> base_;
  double shift_;
};

class PointCurve : public ArcCurve {
 public:
  explicit PointCurve(Vec2 p) : p_(p) {}
  Vec2 at(double) const override { return p_; }

 private:
  Vec2 p_;
};

class GraphCurve : public ArcCurve {
 public:
  GraphCurve(double x0, double t0, double speed, std::function<double(double)> g, double c)
      : x0_(x0), t0_(t0), speed_(speed), g_(std::move(g)), c_(c) {}
  Vec2 at(double t) const override {
    const double x = x0_ + speed_ * (t - t0_);
    return {x, g_(x) + c_};
  }

 private:
  double x0_, t0_, speed_;
  std::function<double(double)> g_;
  double c_;
};

class SlideCurve : public ArcCurve {
 public:
  SlideCurve(double x0, double x1, double t0, std::function<double(double)> primitive)
      : x0_(x0), x1_(x1), t0_(t0), f0_(primitive(x0)), primitive_(std::move(primitive)) {}
  Vec2 at(double t) const override {
    // primitive(x) - primitive(x0) is monotone in x between x0 and x1.
    const double target = t - t0_;
    double a = x0_, b = x1_;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      if (primitive_(m) - f0_ < target) a = m;
      else b = m;
    }
    return {0.5 * (a + b), 0.0};
  }

 private:
  double x0_, x1_, t0_, f0_;
  std::function<double(double)> primitive_;
};

constexpr double kSnap = 1e-12;

double bisect_root(const std::function<double(double)>& h, double a, double b) {
  double ha = h(a);
  if (h(b) == 0.0) return b;
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

Arc Arc::shifted(double shift) const {
  Arc out = *this;
  out.t0 += shift;
  out.t1 += shift;
  if (curve) out.curve = std::make_shared<ShiftedCurve>(curve, shift);
  return out;
}

PolylineCurve::PolylineCurve(std::vector<double> times, Polyline points)
    : times_(std::move(times)), points_(std::move(points)) {
  if (times_.size() != points_.size() || times_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "polyline curve needs matching, nonempty times and points");
  }
}

Vec2 PolylineCurve::at(double t) const {
  if (t <= times_.front()) return points_.front();
  if (t >= times_.back()) return points_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t i = static_cast<size_t>(it - times_.begin());
  const double ta = times_[i - 1], tb = times_[i];
  if (t == ta) return points_[i - 1];
  const double s = (t - ta) / (tb - ta);
  return points_[i - 1] + s * (points_[i] - points_[i - 1]);
}

GraphFlow::GraphFlow(GraphProfile upper, GraphProfile lower, std::optional<HorizontalSlide> slide)
    : upper_(std::move(upper)), lower_(std::move(lower)), slide_(std::move(slide)) {}

Arc GraphFlow::advance(const PiecewiseField& z, Mode mode, Vec2 p, double t0, double max_dt,
                       const SlideLimit& limit) const {
  if (!z.switching.is_horizontal()) {
    throw Error(ErrorCode::InvalidArgument, "closed-form graph flow requires the switching function y");
  }
  if (!std::isfinite(max_dt) || max_dt < 0.0) throw Error(ErrorCode::InvalidArgument, "max_dt must be finite and >= 0");
  switch (mode) {
    case Mode::Upper: return advance_graph(upper_, mode, p, t0, max_dt);
    case Mode::Lower: return advance_graph(lower_, mode, p, t0, max_dt);
    case Mode::Sliding: return advance_slide(p, t0, max_dt, limit);
    case Mode::Stationary: break;
  }
  Arc a;
  a.mode = Mode::Stationary;
  a.t0 = t0;
  a.t1 = t0 + max_dt;
  a.start = a.end = p;
  a.curve = std::make_shared<PointCurve>(p);
  return a;
}

Arc GraphFlow::advance_graph(const GraphProfile& prof, Mode mode, Vec2 p, double t0, double max_dt) const {
  const double dir = prof.speed > 0.0 ? 1.0 : -1.0;
  double c = p.y - prof.g(p.x);
  const bool on_lattice = std::abs(c) <= kSnap;
  if (on_lattice) c = 0.0;
  const double x_lim = p.x + prof.speed * max_dt;
  const double lo = std::min(p.x, x_lim), hi = std::max(p.x, x_lim);

  std::optional<double> hit;
  if (on_lattice) {
    for (double zx : prof.zeros(lo, hi)) {
      if (dir * (zx - p.x) <= kSnap) continue;
      if (!hit || dir * (zx - *hit) < 0.0) hit = zx;
    }
  } else {
    auto h = [&](double x) { return prof.g(x) + c; };
    std::vector<double> cuts = prof.critical_points(lo, hi);
    if (dir < 0.0) std::reverse(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), p.x);
    cuts.push_back(x_lim);
    for (size_t i = 0; i + 1 < cuts.size() && !hit; ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (a == b) continue;
      const double ha = h(a), hb = h(b);
      if (hb == 0.0) hit = b;
      else if ((ha < 0.0 && hb > 0.0) || (ha > 0.0 && hb < 0.0)) hit = bisect_root(h, a, b);
    }
  }

  Arc arc;
  arc.mode = mode;
  arc.t0 = t0;
  arc.start = p;
  arc.curve = std::make_shared<GraphCurve>(p.x, t0, prof.speed, prof.g, c);
  if (hit) {
    arc.t1 = t0 + (*hit - p.x) / prof.speed;
    arc.end = {*hit, 0.0};
    arc.ending = ArcEnd::Sigma;
  } else {
    arc.t1 = t0 + max_dt;
    arc.end = arc.curve->at(arc.t1);
    arc.ending = ArcEnd::TimeLimit;
  }
  return arc;
}

Arc GraphFlow::advance_slide(Vec2 p, double t0, double max_dt, const SlideLimit& limit) const {
  if (!slide_) throw Error(ErrorCode::UndefinedSliding, "this field has no sliding or escaping region");
  const HorizontalSlide& s = *slide_;
  if (p.x < s.lo - kSnap || p.x > s.hi + kSnap || std::abs(p.y) > kSnap) {
    throw Error(ErrorCode::UndefinedSliding, "point is outside the sliding/escaping segment");
  }
  const double x0 = std::clamp(p.x, s.lo, s.hi);
  double target = s.direction < 0.0 ? s.lo : s.hi;
  ArcEnd ending = ArcEnd::RegionBoundary;
  for (double b : s.breaks) {
    if (s.direction * (b - x0) > kSnap && s.direction * (b - target) < 0.0) target = b;
  }
  if (limit.stop) {
    const double xs = limit.stop->x;
    if (s.direction * (xs - x0) > 0.0 && s.direction * (xs - target) < 0.0) {
      target = xs;
      ending = ArcEnd::SlideStop;
    }
  }
  double duration = s.primitive(target) - s.primitive(x0);
  Arc arc;
  arc.mode = Mode::Sliding;
  arc.t0 = t0;
  arc.start = {x0, 0.0};
  if (duration > max_dt) {
    auto curve = std::make_shared<SlideCurve>(x0, target, t0, s.primitive);
    arc.t1 = t0 + max_dt;
    arc.end = curve->at(arc.t1);
    arc.curve = curve;
    arc.ending = ArcEnd::TimeLimit;
    return arc;
  }
  arc.t1 = t0 + duration;
  arc.end = {target, 0.0};
  arc.ending = ending;
  arc.curve = std::make_shared<SlideCurve>(x0, target, t0, s.primitive);
  return arc;
}

namespace {

using State = std::array<double, 2>;

Vec2 to_vec(const State& s) { return {s[0], s[1]}; }

Vec2 project_to_sigma(const SwitchingFunction& f, Vec2 p) {
  if (f.is_horizontal()) return {p.x, 0.0};
  for (int i = 0; i < 4; ++i) {
    const Vec2 g = f.gradient(p);
    const double n2 = dot(g, g);
    if (n2 == 0.0) break;
    p = p - (f(p) / n2) * g;
  }
  return p;
}

}  // namespace

Arc NumericFlow::advance(const PiecewiseField& z, Mode mode, Vec2 p, double t0, double max_dt,
                         const SlideLimit& limit) const {
  namespace odeint = boost::numeric::odeint;
  if (!std::isfinite(max_dt) || max_dt < 0.0) throw Error(ErrorCode::InvalidArgument, "max_dt must be finite and >= 0");

  Arc arc;
  arc.mode = mode;
  arc.t0 = t0;
  arc.start = p;
  if (mode == Mode::Stationary || max_dt == 0.0) {
    arc.t1 = t0 + max_dt;
    arc.end = p;
    arc.curve = std::make_shared<PointCurve>(p);
    return arc;
  }

  const SwitchingFunction& f = z.switching;
  std::function<Vec2(Vec2)> field;
  if (mode == Mode::Upper) field = [&](Vec2 q) { return z.upper(q); };
  else if (mode == Mode::Lower) field = [&](Vec2 q) { return z.lower(q); };
  else field = [&](Vec2 q) { return sliding_field(z, q); };

  const double side = mode == Mode::Upper ? 1.0 : -1.0;
  auto h = [&](Vec2 q) { return side * f(q); };
  auto dh = [&](Vec2 q) { return side * dot(f.gradient(q), field(q)); };
  auto xf = [&](Vec2 q) { return lie_derivative(z.upper, f, q, 1); };
  auto yf = [&](Vec2 q) { return lie_derivative(z.lower, f, q, 1); };
  const Vec2 stop_dir = limit.stop ? field(p) : Vec2{};
  auto stop_gap = [&](Vec2 q) { return dot(q - *limit.stop, stop_dir); };

  auto rhs = [&](const State& s, State& ds, double) {
    const Vec2 v = field(to_vec(s));
    ds = {v.x, v.y};
  };
  auto stepper = odeint::make_dense_output(opts_.abs_tol, opts_.rel_tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(State{p.x, p.y}, t0, std::min(1e-3, max_dt));

  std::vector<double> times{t0};
  Polyline points{p};
  const double t_end = t0 + max_dt;
  bool armed = mode == Mode::Sliding || h(p) > opts_.event_tol;

  auto state_at = [&](double t) {
    State s;
    stepper.calc_state(t, s);
    return to_vec(s);
  };
  auto bisect_time = [&](const std::function<double(Vec2)>& g, double ta, double tb) {
    double ga = g(state_at(ta));
    for (int i = 0; i < 200; ++i) {
      const double tm = 0.5 * (ta + tb);
      if (tm == ta || tm == tb) break;
      const double gm = g(state_at(tm));
      if (std::abs(gm) <= opts_.event_tol) return tm;
      if ((gm > 0.0) == (ga > 0.0)) {
        ta = tm;
        ga = gm;
      } else {
        tb = tm;
      }
    }
    return 0.5 * (ta + tb);
  };

  while (true) {
    const double t_prev = stepper.current_time();
    const Vec2 q_prev = to_vec(stepper.current_state());
    stepper.do_step(rhs);
    const double t_cur = std::min(stepper.current_time(), t_end);
    const Vec2 q_cur = state_at(t_cur);

    std::optional<double> t_event;
    ArcEnd why = ArcEnd::Sigma;
    auto consider = [&](double t, ArcEnd e) {
      if (!t_event || t < *t_event) {
        t_event = t;
        why = e;
      }
    };
    const int scan = opts_.scan_per_step;
    for (int i = 0; i < scan && !t_event; ++i) {
      const double ta = t_prev + (t_cur - t_prev) * (static_cast<double>(i) / scan);
      const double tb = i + 1 == scan ? t_cur : t_prev + (t_cur - t_prev) * (static_cast<double>(i + 1) / scan);
      const Vec2 qa = i == 0 ? q_prev : state_at(ta);
      const Vec2 qb = i + 1 == scan ? q_cur : state_at(tb);
      if (mode != Mode::Sliding) {
        if (!armed && h(qb) < -opts_.event_tol && dh(qb) < 0.0) {
          throw Error(ErrorCode::EventLocationFailure,
                      std::string("orbit of the ") + to_string(mode) + " field leaves its half plane immediately");
        }
        if (!armed && h(qb) > opts_.event_tol) {
          armed = true;
          continue;
        }
        if (armed) {
          if (h(qa) > 0.0 && h(qb) <= 0.0) consider(bisect_time(h, ta, tb), ArcEnd::Sigma);
          if (dh(qa) < 0.0 && dh(qb) >= 0.0) {
            const double tm = bisect_time(dh, ta, tb);
            if (std::abs(h(state_at(tm))) <= opts_.touch_tol) consider(tm, ArcEnd::Sigma);
          }
        }
      } else {
        if ((xf(qa) > 0.0) != (xf(qb) > 0.0)) consider(bisect_time(xf, ta, tb), ArcEnd::RegionBoundary);
        if ((yf(qa) > 0.0) != (yf(qb) > 0.0)) consider(bisect_time(yf, ta, tb), ArcEnd::RegionBoundary);
        if (limit.stop && stop_gap(qa) < 0.0 && stop_gap(qb) >= 0.0) {
          consider(bisect_time(stop_gap, ta, tb), ArcEnd::SlideStop);
        }
      }
    }

    const double t_stop = t_event ? *t_event : t_cur;
    const int n = std::max(opts_.samples_per_step, static_cast<int>(std::ceil((t_stop - t_prev) / opts_.max_sample_dt)));
    for (int i = 1; i <= n; ++i) {
      const double t = t_prev + (t_stop - t_prev) * (static_cast<double>(i) / n);
      if (t > times.back()) {
        times.push_back(t);
        points.push_back(state_at(t));
      }
    }
    if (t_event) {
      Vec2 q = mode == Mode::Sliding && why == ArcEnd::SlideStop ? *limit.stop : project_to_sigma(f, points.back());
      points.back() = q;
      arc.t1 = times.back();
      arc.end = q;
      arc.ending = why;
      break;
    }
    if (t_cur >= t_end) {
      arc.t1 = t_end;
      arc.end = points.back();
      arc.ending = ArcEnd::TimeLimit;
      break;
    }
  }
  if (mode == Mode::Sliding) {
    for (auto& q : points) q = project_to_sigma(f, q);
    arc.end = points.back();
  }
  arc.curve = std::make_shared<PolylineCurve>(std::move(times), std::move(points));
  return arc;
}

const FlowModel& flow_for(const PiecewiseField& z) {
  static const NumericFlow numeric;
  return z.flow ? *z.flow : numeric;
}

}  // namespace psvf
