#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psvf/canonical.hpp"
#include "psvf/field.hpp"
#include "psvf/flow.hpp"
#include "psvf/symbolic.hpp"

namespace psvf {

/// Forward continuations available at a point of Σ, ordered X, Y, Z^T.
/// A singular tangency yields the single Stationary continuation.
std::vector<Mode> continue_at(const PiecewiseField& z, Vec2 p, const Tolerances& tol = {});

/// One arc from p lasting at most dt.  Off Σ the governing field is the one
/// of p's half plane; on Σ the continuation must be unique unless `mode` is
/// given.
Arc integrate_local(const PiecewiseField& z, Vec2 p, double dt, std::optional<Mode> mode = std::nullopt,
                    double t0 = 0.0, const Tolerances& tol = {});

/// Time-ordered concatenation of arcs.  Before any arc is added the
/// trajectory is the single point `origin` at `t_origin`.
struct Trajectory {
  Vec2 origin;
  double t_origin = 0.0;
  std::vector<Arc> arcs;
  /// One entry per junction with more than one continuation.
  std::vector<std::string> branch_log;

  double t_begin() const { return arcs.empty() ? t_origin : arcs.front().t0; }
  double t_end() const { return arcs.empty() ? t_origin : arcs.back().t1; }
  Vec2 end_point() const { return arcs.empty() ? origin : arcs.back().end; }
  /// Arc governing time t; at a junction the later arc is returned.
  const Arc* arc_at(double t) const;
  Vec2 at(double t) const;
  /// The trajectory t -> this(t + dt).
  Trajectory shifted(double dt) const;
  /// Largest endpoint mismatch between consecutive arcs (space and time).
  double max_junction_gap() const;
  /// Samples on [a, b] (clipped), `per_arc` per full arc, with every arc
  /// junction inside the interval included.
  Polyline sample(double a, double b, int per_arc = 512) const;
};

struct BranchOptions {
  std::size_t max_branches = 4096;
  /// Σ abscissas at which sliding may be left early (discretizes the
  /// continuum of exits from an escaping segment).
  std::vector<double> slide_stops;
  Tolerances tol;
};

struct BranchNode {
  Vec2 point;
  double t = 0.0;
  std::vector<Mode> options;
  int depth = 0;
};

struct BranchTree {
  Vec2 root;
  double t0 = 0.0;
  double horizon = 0.0;
  std::vector<BranchNode> nodes;
  std::vector<Trajectory> leaves;
  int depth = 0;
  bool truncated = false;
};

/// Every distinct forward trajectory from p0 on [t0, t0 + horizon], choices
/// explored in X, Y, Z^T order.  Stops early with `truncated` set once
/// max_branches leaves exist.
BranchTree enumerate_branches(const PiecewiseField& z, Vec2 p0, double horizon, const BranchOptions& opts = {},
                              double t0 = 0.0);

/// Choice made at a junction: the continuation and, for sliding, an optional
/// early exit point.
struct Choice {
  Mode mode = Mode::Upper;
  std::optional<Vec2> stop;
};

using Chooser = std::function<Choice(const Trajectory& so_far, Vec2 p, double t, const std::vector<Mode>& options)>;

/// Follows the flow from p0 until t_end (or until `done` returns true after
/// an arc), asking `choose` at each junction with several continuations.
Trajectory simulate(const PiecewiseField& z, Vec2 p0, double t0, double t_end, const Chooser& choose,
                    const std::function<bool(const Trajectory&)>& done = {}, const Tolerances& tol = {});

/// Trajectory whose unit interval [j, j+1] runs through compartment s_j; the
/// first symbol starts at time `offset` at a fold.
Trajectory trajectory_from_symbols(const CanonicalFamily& family, const SymbolWindow& w);

/// s_j for j in [lo, hi]; a fold at time j is resolved by the compartment
/// at time j + 1/2.  `tol` is the allowed distance from the invariant set.
SymbolWindow itinerary(const CanonicalFamily& family, const Trajectory& g, long long lo, long long hi,
                       double tol = 1e-9);

/// Times at which the trajectory sits on a fold of the family.
std::vector<double> fold_hit_times(const CanonicalFamily& family, const Trajectory& g);

Trajectory time_one(const Trajectory& g);
Trajectory time_one_inverse(const Trajectory& g);

// Bean field -----------------------------------------------------------------

/// What a loop does once it reaches the two-fold at the origin: follow the
/// outer boundary with Y, or slide to (u, 0) and leave with X or with Y.
struct BeanChoice {
  enum Kind { Outer, ExitX, ExitY } kind = Outer;
  double u = 0.0;
};

/// Orbit from (0, y0) through one loop per choice, ending at the following
/// section hit, with time shifted so beat `anchor_beat` is at t = 0.
Trajectory bean_trajectory(const CanonicalFamily& bean, double y0, const std::vector<BeanChoice>& loops,
                           int anchor_beat = 0);

/// Section hits in the trajectory's time span, ascending.
std::vector<double> section_hits(const CanonicalFamily& bean, const Trajectory& g);

/// Smallest t > 0 with g(t) in K.
double return_time(const CanonicalFamily& bean, const Trajectory& g);
Trajectory return_map(const CanonicalFamily& bean, const Trajectory& g);

/// Beat t_j for j in [lo, hi], where t_0 is the latest section hit at time <= 0.
std::vector<double> beat_times(const CanonicalFamily& bean, const Trajectory& g, long long lo, long long hi);

/// Beat indices available in the trajectory: {first, last}.
std::pair<long long, long long> beat_range(const CanonicalFamily& bean, const Trajectory& g);

struct RealWindow {
  long long offset = 0;
  std::vector<double> values;
  long long last() const { return offset + static_cast<long long>(values.size()) - 1; }
};

/// s_j = y(g(t_j)).
RealWindow bean_itinerary(const CanonicalFamily& bean, const Trajectory& g, long long lo, long long hi);

}  // namespace psvf
