#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psvf/canonical.hpp"
#include "psvf/trajectory.hpp"

namespace psvf {

/// Version string written into every generated SVG.
inline constexpr const char* kGeneratorVersion = "psvf 1.0.0";

/// Rows t,x,y,governing with `per_arc` time-uniform samples per arc; the
/// junction between two arcs appears as two rows with the same t.
std::string trajectory_csv(const Trajectory& g, int per_arc = 512);

/// Inverse of trajectory_csv: each arc becomes a sampled polyline.
Trajectory trajectory_from_csv(const std::string& text);

nlohmann::json trajectory_json(const Trajectory& g);
nlohmann::json branch_tree_json(const BranchTree& tree);
nlohmann::json window_json(const SymbolWindow& w);

/// Folds, crossing points, Σ regions, compartments and (finite k) the
/// transition matrix of a canonical family.
nlohmann::json describe_family(const CanonicalFamily& family);

/// Tangencies and Σ regions of an arbitrary field.
nlohmann::json describe_field(const PiecewiseField& z, int sigma_samples = 4000);

/// Exact coefficients of P_k, ascending, as "p/q" strings.
nlohmann::json pk_coefficients_json(int k);

struct PortraitOptions {
  int width = 800;
  int height = 600;
  int sigma_samples = 2000;
  /// Visible x range of the infinite family.
  double infinite_half_width = 3.0;
  /// Extra orbits to draw.
  std::vector<Polyline> orbits;
};

std::string portrait_svg(const CanonicalFamily& family, const PortraitOptions& opts = {});
/// For a field without a known invariant set the loops through its
/// visible-visible two-folds stand in for it.
std::string portrait_svg(const PiecewiseField& z, const PortraitOptions& opts = {});

}  // namespace psvf
