#include "psvf/sigma_scan.hpp"

#include <algorithm>
#include <cmath>

#include "psvf/errors.hpp"

namespace psvf {

std::optional<double> sigma_y(const SwitchingFunction& f, double x) {
  if (f.is_horizontal()) return 0.0;
  double y = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double v = f({x, y});
    if (std::abs(v) <= 1e-14) return y;
    const double fy = f.gradient({x, y}).y;
    if (std::abs(fy) < 1e-12) return std::nullopt;
    y -= v / fy;
  }
  return std::abs(f({x, y})) <= 1e-10 ? std::optional<double>(y) : std::nullopt;
}

std::vector<double> lie_roots_on_sigma(const PiecewiseField& z, const SmoothField2D& field, int samples) {
  std::vector<double> xs, vs;
  auto value = [&](double x) -> std::optional<double> {
    const auto y = sigma_y(z.switching, x);
    if (!y) return std::nullopt;
    return lie_derivative(field, z.switching, {x, *y}, 1);
  };
  for (int i = 0; i <= samples; ++i) {
    const double x = z.domain_min + (z.domain_max - z.domain_min) * (static_cast<double>(i) / samples);
    if (const auto v = value(x)) {
      xs.push_back(x);
      vs.push_back(*v);
    }
  }
  std::vector<double> roots;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (vs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (i + 1 < xs.size() && vs[i + 1] != 0.0 && (vs[i] > 0.0) != (vs[i + 1] > 0.0)) {
      double a = xs[i], b = xs[i + 1], fa = vs[i];
      for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const auto fm = value(m);
        if (!fm) break;
        if (*fm == 0.0) {
          a = b = m;
          break;
        }
        if ((*fm > 0.0) == (fa > 0.0)) {
          a = m;
          fa = *fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  return roots;
}

std::vector<SigmaTangency> sigma_tangencies(const PiecewiseField& z, int samples, double tangency_tol) {
  std::vector<double> all = lie_roots_on_sigma(z, z.upper, samples);
  const std::vector<double> ry = lie_roots_on_sigma(z, z.lower, samples);
  all.insert(all.end(), ry.begin(), ry.end());
  std::sort(all.begin(), all.end());
  std::vector<double> xs;
  for (double x : all)
    if (xs.empty() || x - xs.back() > 1e-7) xs.push_back(x);
  std::vector<SigmaTangency> out;
  Tolerances tol;
  tol.tangency = tangency_tol;
  for (double x : xs) {
    const Vec2 p{x, *sigma_y(z.switching, x)};
    try {
      out.push_back({p, classify_fold(z, p, tol)});
    } catch (const Error&) {
    }
  }
  return out;
}

std::vector<SigmaSegment> sigma_regions(const PiecewiseField& z, int samples) {
  std::vector<SigmaSegment> out;
  for (int i = 0; i <= samples; ++i) {
    const double x = z.domain_min + (z.domain_max - z.domain_min) * (static_cast<double>(i) / samples);
    const auto y = sigma_y(z.switching, x);
    if (!y) continue;
    const Vec2 p{x, *y};
    RegionClass r;
    try {
      r = classify_point(z, p);
    } catch (const Error&) {
      continue;
    }
    if (r == RegionClass::TangencyRegular || r == RegionClass::TangencySingular) continue;
    if (out.empty() || out.back().region != r) {
      SigmaSegment s;
      s.x0 = x;
      s.region = r;
      out.push_back(s);
    }
    out.back().x1 = x;
    out.back().points.push_back(p);
  }
  return out;
}

}  // namespace psvf
