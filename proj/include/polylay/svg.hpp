#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "polylay/bundle.hpp"
#include "polylay/geometry.hpp"
#include "polylay/layout_state.hpp"

namespace polylay {

enum class View { kPrimal, kDual };

inline View parse_view(std::string_view s) {
  if (s == "primal") return View::kPrimal;
  if (s == "dual") return View::kDual;
  throw std::invalid_argument("unknown view '" + std::string(s) + "'");
}

// ColorBrewer Set3.
inline constexpr std::array<const char*, 12> kPalette = {
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};
inline constexpr double kFillOpacity = 0.55;
inline constexpr double kPixelsPerUnit = 100.0;
inline constexpr double kMarginPx = 20.0;
inline constexpr double kVertexRadiusPx = 4.0;

/// Outline of a monogon in layout coordinates: circle center, the two tangent
/// points and whether a tangent exists (vertex outside the circle).
struct Waterdrop {
  Point2 vertex;
  Point2 center;
  Point2 t1;
  Point2 t2;
  double radius;
  bool tangent;
};

inline Waterdrop waterdrop(Point2 v, double angle, double radius, double center_dist) {
  Waterdrop w{v, v + direction(angle) * center_dist, v, v, radius, center_dist > radius};
  if (w.tangent) {
    const double phi = angle + std::numbers::pi;  // direction center -> vertex
    const double alpha = std::acos(radius / center_dist);
    w.t1 = w.center + direction(phi + alpha) * radius;
    w.t2 = w.center + direction(phi - alpha) * radius;
  }
  return w;
}

namespace detail {

inline std::string fmt3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct PixelMap {
  double min_x, max_y;
  std::string x(double v) const { return fmt3(kMarginPx + (v - min_x) * kPixelsPerUnit); }
  std::string y(double v) const { return fmt3(kMarginPx + (max_y - v) * kPixelsPerUnit); }
  std::string xy(Point2 p) const { return x(p.x) + " " + y(p.y); }
};

}  // namespace detail

/// SVG for one view of the bundle. Larger polygons are painted first so
/// smaller ones stay visible; vertices go on top.
inline std::string render_svg(const LayoutBundle& b, View view) {
  if (view == View::kDual && !b.dual) throw DataError("render: bundle has no dual view");
  const ViewLayout& vl = view == View::kDual ? *b.dual : b.primal;
  const Hypergraph& h = vl.hypergraph;
  const LayoutState& s = vl.state;
  const double rho = b.style.monogon_radius;
  const double cdist = b.style.monogon_center_dist;

  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto extend = [&](Point2 p, double r) {
    lo_x = std::min(lo_x, p.x - r);
    lo_y = std::min(lo_y, p.y - r);
    hi_x = std::max(hi_x, p.x + r);
    hi_y = std::max(hi_y, p.y + r);
  };
  for (const auto& p : s.positions) extend(p, 0.0);
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    if (h.relationships()[r].cardinality() == 1) {
      extend(monogon_center(s, static_cast<int>(r), cdist), rho);
    }
  }
  if (h.num_entities() == 0) lo_x = lo_y = hi_x = hi_y = 0.0;
  const detail::PixelMap px{lo_x, hi_y};
  const std::string width = detail::fmt3((hi_x - lo_x) * kPixelsPerUnit + 2 * kMarginPx);
  const std::string height = detail::fmt3((hi_y - lo_y) * kPixelsPerUnit + 2 * kMarginPx);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + width +
         "\" height=\"" + height + "\" viewBox=\"0 0 " + width + " " + height + "\">";
  if (h.num_entities() == 0) return out + "</svg>\n";
  out += "\n";

  std::vector<int> paint(h.num_relationships());
  std::iota(paint.begin(), paint.end(), 0);
  std::sort(paint.begin(), paint.end(), [&](int a, int c) {
    const auto& ra = h.relationship(a);
    const auto& rc = h.relationship(c);
    if (ra.cardinality() != rc.cardinality()) return ra.cardinality() > rc.cardinality();
    return ra.id < rc.id;
  });

  char opacity[16];
  std::snprintf(opacity, sizeof opacity, "%.2f", kFillOpacity);
  out += "<g class=\"polygons\" stroke=\"#333333\" stroke-width=\"1.5\" stroke-linejoin=\"round\">\n";
  for (int r : paint) {
    const auto& rel = h.relationship(r);
    const char* color = kPalette[static_cast<std::size_t>(r) % kPalette.size()];
    std::string d;
    if (rel.cardinality() == 1) {
      const Point2 v = s.positions[static_cast<std::size_t>(rel.members.front())];
      const Waterdrop w = waterdrop(v, s.monogon_angles[static_cast<std::size_t>(r)], rho, cdist);
      const std::string rad = detail::fmt3(rho * kPixelsPerUnit);
      if (w.tangent) {
        // The y-flip mirrors orientation, so the arc runs negative-angle in pixels.
        d = "M " + px.xy(w.vertex) + " L " + px.xy(w.t1) + " A " + rad + " " + rad + " 0 1 0 " +
            px.xy(w.t2) + " Z";
      } else {
        const Point2 far = w.center * 2.0 - w.vertex;
        const Point2 start = w.center == w.vertex ? w.center + Point2{rho, 0.0} : w.vertex;
        const Point2 opp = w.center == w.vertex ? w.center - Point2{rho, 0.0} : far;
        d = "M " + px.xy(start) + " A " + rad + " " + rad + " 0 1 0 " + px.xy(opp) + " A " + rad +
            " " + rad + " 0 1 0 " + px.xy(start) + " Z";
      }
    } else {
      const auto& order = s.orders[static_cast<std::size_t>(r)];
      for (std::size_t i = 0; i < order.size(); ++i) {
        d += (i == 0 ? "M " : " L ") + px.xy(s.positions[static_cast<std::size_t>(order[i])]);
      }
      d += " Z";
    }
    out += "<path class=\"polygon\" data-id=\"" + detail::xml_escape(rel.id) +
           "\" data-cardinality=\"" + std::to_string(rel.cardinality()) + "\" fill=\"" + color +
           "\" fill-opacity=\"" + opacity + "\" d=\"" + d + "\"/>\n";
  }
  out += "</g>\n";

  out += "<g class=\"vertices\" fill=\"#222222\">\n";
  for (std::size_t i = 0; i < h.num_entities(); ++i) {
    out += "<circle class=\"vertex\" data-id=\"" + detail::xml_escape(h.entities()[i].id) +
           "\" cx=\"" + px.x(s.positions[i].x) + "\" cy=\"" + px.y(s.positions[i].y) + "\" r=\"" +
           detail::fmt3(kVertexRadiusPx) + "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace polylay
