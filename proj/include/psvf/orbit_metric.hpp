#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "psvf/canonical.hpp"
#include "psvf/geometry.hpp"
#include "psvf/symbolic.hpp"
#include "psvf/trajectory.hpp"

namespace psvf {

enum class HausdorffMode {
  /// Distances between sample points only: an exact metric on finite sets.
  Points,
  /// Each sample of one curve against the segments of the other.
  Polyline,
};

double hausdorff(const Polyline& a, const Polyline& b, HausdorffMode mode = HausdorffMode::Polyline);

/// Largest distance from a sample of `a` to the polyline `b`.
double directed_distance(const Polyline& a, const Polyline& b);

/// Orbit class: a representative anchored at a fold hit (symbolic families)
/// or a section hit (bean), with its itinerary.
struct OrbitClass {
  FamilySpec family;
  Trajectory representative;
  std::optional<SymbolWindow> symbols;
  std::optional<RealWindow> beats;
};

/// Re-anchors g at its latest fold hit (or section hit) at time <= 0 and
/// computes the itinerary over [lo, hi].
OrbitClass normalize(const CanonicalFamily& family, const Trajectory& g, long long lo, long long hi);

struct RhoOptions {
  int samples_per_unit = 512;
  HausdorffMode mode = HausdorffMode::Polyline;
};

/// sum_{|i| <= n} d_i / 2^|i| with d_i the Hausdorff distance between the
/// i-th unit arcs (or i-th loops for the bean), plus a tail bound.
MetricBound rho(const CanonicalFamily& family, const Trajectory& a, const Trajectory& b, int n,
                const RhoOptions& opts = {});

/// Same on normalized classes; FamilyMismatch unless both belong to `family`.
MetricBound rho(const CanonicalFamily& family, const OrbitClass& a, const OrbitClass& b, int n,
                const RhoOptions& opts = {});

/// Per-index distances d_i, i = -n..n.
std::vector<double> rho_terms(const CanonicalFamily& family, const Trajectory& a, const Trajectory& b, int n,
                              const RhoOptions& opts = {});

struct ConjugacyOptions {
  int samples = 100;
  int depth = 10;
  std::uint64_t seed = 1;
  int window = 20;
  int rho_window = 6;
  int per_unit = 256;
};

/// Report with the symbol-level conjugacy identity, surjectivity evidence and
/// continuity checks; "pass" is true when every check passes.
nlohmann::json verify_conjugacy(const CanonicalFamily& family, const ConjugacyOptions& opts = {});

/// Arc-length correspondence between two polylines traversed from their
/// first to their last vertex.
class ArcLengthMap {
 public:
  ArcLengthMap(Polyline a, Polyline b);
  /// Point of B with the same normalized arc length as `s` has on A.
  Vec2 map_parameter(double s) const;
  /// Normalized arc length of the vertex `i` of A.
  double parameter_of_vertex(size_t i) const { return sa_[i]; }
  /// Images of A's vertices.
  Polyline map_vertices() const;
  double length_a() const { return sa_len_; }
  double length_b() const { return sb_len_; }

 private:
  Polyline a_, b_;
  std::vector<double> sa_, sb_;
  double sa_len_ = 0.0, sb_len_ = 0.0;
};

ArcLengthMap arc_length_homeomorphism(const Polyline& a, const Polyline& b);

/// Polyline points at normalized arc lengths s (ascending, in [0, 1]).
Polyline point_at_arc_length(const Polyline& curve, const std::vector<double>& s);

struct EquivalenceOptions {
  std::uint64_t seed = 1;
  int words = 20;
  int word_length = 8;
  double tol = 1e-6;
  int sigma_samples = 4000;
};

/// Builds the Σ-equivalence h between two fields with homoclinic loops
/// through visible-visible two-folds and checks it.  Throws SkeletonMismatch
/// when the fold skeletons differ.
nlohmann::json sigma_equivalence_check(const PiecewiseField& a, const PiecewiseField& b,
                                       const EquivalenceOptions& opts = {});

/// Sampled arcs of the loops leaving each visible-visible two-fold of `z`.
std::vector<Polyline> two_fold_loops(const PiecewiseField& z, int sigma_samples = 4000);

}  // namespace psvf
