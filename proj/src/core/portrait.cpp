#include <algorithm>
#include <cmath>
#include <cstdio>

#include "psvf/errors.hpp"
#include "psvf/io.hpp"
#include "psvf/orbit_metric.hpp"
#include "psvf/sigma_scan.hpp"

namespace psvf {

namespace {

struct Box {
  double x0, x1, y0, y1;
};

class Svg {
 public:
  Svg(const PortraitOptions& o, Box b) : o_(o), b_(b) {
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
            std::to_string(o.height) + "\" viewBox=\"0 0 " + std::to_string(o.width) + " " +
            std::to_string(o.height) + "\">\n";
    out_ += std::string("<metadata>generator: ") + kGeneratorVersion + "</metadata>\n";
    out_ += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double sx(double x) const { return kMargin + (x - b_.x0) / (b_.x1 - b_.x0) * (o_.width - 2 * kMargin); }
  double sy(double y) const { return o_.height - kMargin - (y - b_.y0) / (b_.y1 - b_.y0) * (o_.height - 2 * kMargin); }

  void path(const Polyline& pts, const std::string& cls, const std::string& style, bool closed = false) {
    if (pts.size() < 2) return;
    std::string d;
    for (size_t i = 0; i < pts.size(); ++i) d += (i ? " L" : "M") + num(sx(pts[i].x)) + "," + num(sy(pts[i].y));
    if (closed) d += " Z";
    out_ += "<path class=\"" + cls + "\" d=\"" + d + "\" " + style + "/>\n";
  }

  void marker(Vec2 p, bool square, bool filled, const std::string& cls) {
    const std::string fill = filled ? "black" : "white";
    if (square) {
      out_ += "<rect class=\"" + cls + "\" x=\"" + num(sx(p.x) - 7) + "\" y=\"" + num(sy(p.y) - 7) +
              "\" width=\"14\" height=\"14\" fill=\"" + fill + "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    } else {
      out_ += "<circle class=\"" + cls + "\" cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) + "\" r=\"4.5\" fill=\"" +
              fill + "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
  }

  void text(double px, double py, const std::string& s, const std::string& color = "black") {
    out_ += "<text x=\"" + num(px) + "\" y=\"" + num(py) + "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
            color + "\">" + s + "</text>\n";
  }

  std::string finish() { return out_ + "</svg>\n"; }

 private:
  static constexpr double kMargin = 40.0;
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  const PortraitOptions& o_;
  Box b_;
  std::string out_;
};

const char* region_color(RegionClass r) {
  switch (r) {
    case RegionClass::Sliding: return "#1f77b4";
    case RegionClass::Escaping: return "#d62728";
    default: return "#7f7f7f";
  }
}

Box padded(Box b) {
  const double dx = std::max(b.x1 - b.x0, 1e-3), dy = std::max(b.y1 - b.y0, 1e-3);
  return {b.x0 - 0.08 * dx, b.x1 + 0.08 * dx, b.y0 - 0.12 * dy, b.y1 + 0.12 * dy};
}

void draw_sigma_and_folds(Svg& svg, PiecewiseField z, const Box& box, const PortraitOptions& o) {
  z.domain_min = box.x0;
  z.domain_max = box.x1;
  for (const SigmaSegment& s : sigma_regions(z, o.sigma_samples)) {
    const std::string cls = s.region == RegionClass::Sliding    ? "sigma sliding"
                            : s.region == RegionClass::Escaping ? "sigma escaping"
                                                                : "sigma crossing";
    svg.path(s.points, cls, std::string("fill=\"none\" stroke=\"") + region_color(s.region) + "\" stroke-width=\"3\"");
  }
  for (const SigmaTangency& t : sigma_tangencies(z, o.sigma_samples)) {
    if (t.cls.lower) {
      const bool vis = *t.cls.lower == Visibility::Visible;
      svg.marker(t.p, true, vis, vis ? "fold lower visible" : "fold lower invisible");
    }
    if (t.cls.upper) {
      const bool vis = *t.cls.upper == Visibility::Visible;
      svg.marker(t.p, false, vis, vis ? "fold upper visible" : "fold upper invisible");
    }
  }
}

void legend(Svg& svg, const std::string& title) {
  svg.text(10, 18, title);
  svg.text(10, 34, "sigma: grey crossing, blue sliding, red escaping", "#444444");
  svg.text(10, 50, "folds: circle X, square Y; filled visible, hollow invisible", "#444444");
}

void draw_orbits(Svg& svg, const std::vector<Polyline>& orbits) {
  for (const Polyline& p : orbits) svg.path(p, "orbit", "fill=\"none\" stroke=\"#9467bd\" stroke-width=\"1\"");
}

}  // namespace

std::string portrait_svg(const CanonicalFamily& family, const PortraitOptions& o) {
  const InvariantSet& s = family.invariant_set();
  const bool inf = family.spec().kind == FamilyKind::Infinite;
  const double xa = inf ? -o.infinite_half_width : s.x_min, xb = inf ? o.infinite_half_width : s.x_max;
  const Box box = padded({xa, xb, s.y_min, s.y_max});
  Svg svg(o, box);
  const int n = 600;
  Polyline up, lo;
  for (int i = 0; i <= n; ++i) {
    const double x = xa + (xb - xa) * i / n;
    up.push_back({x, s.upper(x)});
    lo.push_back({x, s.lower(x)});
  }
  if (family.spec().kind == FamilyKind::Bean) {
    Polyline region = up;
    region.insert(region.end(), lo.rbegin(), lo.rend());
    svg.path(region, "invariant-set", "fill=\"#2ca02c\" fill-opacity=\"0.15\" stroke=\"none\"", true);
    svg.path({{0.0, 0.0}, {0.0, 1.0}}, "section", "fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"2\" stroke-dasharray=\"4,3\"");
  }
  svg.path(up, "invariant-set upper", "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\"");
  svg.path(lo, "invariant-set lower", "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\"");
  draw_orbits(svg, o.orbits);
  draw_sigma_and_folds(svg, family.field(), box, o);
  legend(svg, "family " + family.spec().label());
  return svg.finish();
}

std::string portrait_svg(const PiecewiseField& z, const PortraitOptions& o) {
  const std::vector<Polyline> loops = two_fold_loops(z, std::max(o.sigma_samples, 2000));
  Box b{z.domain_min, z.domain_max, 0.0, 0.0};
  bool any = false;
  for (const Polyline& p : loops)
    for (const Vec2& q : p) {
      b.y0 = std::min(b.y0, q.y);
      b.y1 = std::max(b.y1, q.y);
      any = true;
    }
  for (int i = 0; i <= 200; ++i) {
    const auto y = sigma_y(z.switching, z.domain_min + (z.domain_max - z.domain_min) * i / 200);
    if (!y) continue;
    b.y0 = std::min(b.y0, *y);
    b.y1 = std::max(b.y1, *y);
  }
  if (!any && b.y1 - b.y0 < 1e-9) {
    b.y0 = -0.25 * (b.x1 - b.x0);
    b.y1 = 0.25 * (b.x1 - b.x0);
  }
  const Box box = padded(b);
  Svg svg(o, box);
  for (const Polyline& p : loops) svg.path(p, "invariant-set loop", "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\"");
  draw_orbits(svg, o.orbits);
  draw_sigma_and_folds(svg, z, box, o);
  legend(svg, "field " + (z.name.empty() ? std::string("(unnamed)") : z.name));
  return svg.finish();
}

}  // namespace psvf
