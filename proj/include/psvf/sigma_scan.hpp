#pragma once

#include <optional>
#include <vector>

#include "psvf/field.hpp"

namespace psvf {

/// Height of Σ above x when Σ is a graph over the x axis (Newton on f(x, .)).
std::optional<double> sigma_y(const SwitchingFunction& f, double x);

/// Abscissas in the field's domain where the Lie derivative of `field` along
/// f vanishes on Σ, located by sign changes on a uniform grid.
std::vector<double> lie_roots_on_sigma(const PiecewiseField& z, const SmoothField2D& field, int samples);

struct SigmaTangency {
  Vec2 p;
  FoldClass cls;
};

/// Classified tangencies of X and Y on Σ, ascending in x; degenerate points
/// are skipped.
std::vector<SigmaTangency> sigma_tangencies(const PiecewiseField& z, int samples, double tangency_tol = 1e-7);

/// Maximal runs of Σ sharing one region class.
struct SigmaSegment {
  double x0 = 0.0;
  double x1 = 0.0;
  RegionClass region = RegionClass::CrossingPos;
  Polyline points;
};

std::vector<SigmaSegment> sigma_regions(const PiecewiseField& z, int samples);

}  // namespace psvf
