#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "psvf/field.hpp"
#include "psvf/geometry.hpp"

namespace psvf {

/// Which vector field governs an arc.
enum class Mode { Upper, Lower, Sliding, Stationary };

const char* to_string(Mode m) noexcept;
Mode mode_from_string(const std::string& s);

/// Time-parameterised curve of a single arc.
class ArcCurve {
 public:
  virtual ~ArcCurve() = default;
  virtual Vec2 at(double t) const = 0;
};

/// Why an arc stopped.
enum class ArcEnd { Sigma, RegionBoundary, SlideStop, TimeLimit };

/// One smooth piece of an orbit on [t0, t1].
struct Arc {
  Mode mode = Mode::Stationary;
  double t0 = 0.0;
  double t1 = 0.0;
  Vec2 start;
  Vec2 end;
  ArcEnd ending = ArcEnd::TimeLimit;
  std::shared_ptr<const ArcCurve> curve;

  /// Position at time t in [t0, t1]; endpoints are returned exactly.
  Vec2 at(double t) const;
  double duration() const { return t1 - t0; }
  /// `n` uniform-in-time samples including both endpoints (n >= 2).
  Polyline sample(int n) const;
  /// Same arc with its time axis moved by `shift`.
  Arc shifted(double shift) const;
};

struct SlideLimit {
  /// Σ point at which a sliding arc is cut short when reached.
  std::optional<Vec2> stop;
};

/// Produces arcs for a field: from `p` under `mode` until the first Σ event,
/// sliding-region boundary or stop point, or until `max_dt` has elapsed.
class FlowModel {
 public:
  virtual ~FlowModel() = default;
  virtual Arc advance(const PiecewiseField& z, Mode mode, Vec2 p, double t0, double max_dt,
                      const SlideLimit& limit) const = 0;
};

/// Orbit family of a field with constant horizontal speed: orbits are the
/// graphs y = g(x) + c, traversed with dx/dt = speed.
struct GraphProfile {
  double speed = 1.0;
  std::function<double(double)> g;
  /// Critical points of g in the open interval (lo, hi), sorted ascending.
  std::function<std::vector<double>(double lo, double hi)> critical_points;
  /// Exact zeros of g in [lo, hi], sorted ascending; used when c vanishes.
  std::function<std::vector<double>(double lo, double hi)> zeros;
};

/// Sliding motion along y = 0 for a horizontal switching manifold.  The
/// time to slide from a to b is primitive(b) - primitive(a).
struct HorizontalSlide {
  double lo = 0.0;
  double hi = 0.0;
  /// Interior points where the region class changes (tangencies).
  std::vector<double> breaks;
  double direction = -1.0;
  std::function<double(double)> primitive;
};

/// Closed-form flow for fields whose two halves are GraphProfile families
/// and whose switching function is y.
class GraphFlow : public FlowModel {
 public:
  GraphFlow(GraphProfile upper, GraphProfile lower, std::optional<HorizontalSlide> slide = std::nullopt);

  Arc advance(const PiecewiseField& z, Mode mode, Vec2 p, double t0, double max_dt,
              const SlideLimit& limit) const override;

  const GraphProfile& profile(Side s) const { return s == Side::Upper ? upper_ : lower_; }

 private:
  Arc advance_graph(const GraphProfile& prof, Mode mode, Vec2 p, double t0, double max_dt) const;
  Arc advance_slide(Vec2 p, double t0, double max_dt, const SlideLimit& limit) const;

  GraphProfile upper_;
  GraphProfile lower_;
  std::optional<HorizontalSlide> slide_;
};

struct NumericOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double event_tol = 1e-12;
  /// Largest |f| at a local extremum of f along the orbit that still counts
  /// as a tangential return to Σ.
  double touch_tol = 1e-8;
  int samples_per_step = 8;
  /// Largest time gap between stored samples of an arc.
  double max_sample_dt = 0.01;
  /// Sub-intervals per integrator step checked for sign changes.
  int scan_per_step = 32;
};

/// Dormand-Prince integration with bisection event location on f = 0, used
/// for fields without a closed-form flow.
class NumericFlow : public FlowModel {
 public:
  explicit NumericFlow(NumericOptions opts = {}) : opts_(opts) {}
  Arc advance(const PiecewiseField& z, Mode mode, Vec2 p, double t0, double max_dt,
              const SlideLimit& limit) const override;

 private:
  NumericOptions opts_;
};

/// Linear interpolation through time-stamped samples.
class PolylineCurve : public ArcCurve {
 public:
  PolylineCurve(std::vector<double> times, Polyline points);
  Vec2 at(double t) const override;
  const std::vector<double>& times() const { return times_; }
  const Polyline& points() const { return points_; }

 private:
  std::vector<double> times_;
  Polyline points_;
};

/// Flow model to use for `z`: its closed form if present, else numeric.
const FlowModel& flow_for(const PiecewiseField& z);

}  // namespace psvf
