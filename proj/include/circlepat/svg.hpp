#pragma once

// SVG layout of a developed pattern: circumcircles, triangles and edges of
// k x k deck translates of the fundamental domain. The y axis is flipped so
// the picture has the usual mathematical orientation.

#include <cstdio>
#include <limits>
#include <string>

#include "circlepat/pattern.hpp"

namespace circlepat {

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

}  // namespace detail

inline std::string export_svg(const CirclePattern& pat, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "tile count must be at least 1");
  const auto& mesh = pat.mesh;
  const auto& dev = pat.dev;
  using detail::num;

  // Vertex positions per face per tile, and circumcircles.
  struct Tile {
    Shift s;
    std::vector<std::array<Complex, 3>> corners;
    std::vector<std::pair<Complex, double>> circles;
  };
  std::vector<Tile> tiles;
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      Tile t{{i, j}, {}, {}};
      const Affine g = dev.deck(t.s);
      for (int f = 0; f < mesh.n_faces(); ++f) {
        const Affine p = g.compose(dev.placement[f]);
        const auto frame = detail::unit_frame(dev.half_angle, f);
        std::array<Complex, 3> c;
        for (int a = 0; a < 3; ++a) c[a] = std::conj(p(frame[a]));
        t.corners.push_back(c);
        const Complex centre = std::conj(p.b);
        const double r = std::abs(p.a);
        t.circles.emplace_back(centre, r);
        x0 = std::min(x0, centre.real() - r);
        x1 = std::max(x1, centre.real() + r);
        y0 = std::min(y0, centre.imag() - r);
        y1 = std::max(y1, centre.imag() + r);
      }
      tiles.push_back(std::move(t));
    }
  const double pad = 0.02 * std::max(x1 - x0, y1 - y0);
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + num(x0) + " " + num(y0) + " " + num(x1 - x0) +
         " " + num(y1 - y0) + "\">\n";
  out +=
      "<style>"
      ".circ{fill:none;stroke:#999999;stroke-width:0.6;vector-effect:non-scaling-stroke}"
      ".tri{fill:#f2f2f2;fill-opacity:0.5;stroke:none}"
      "line{stroke-width:1.2;vector-effect:non-scaling-stroke}"
      ".e0{stroke:#000000}.e1{stroke:#c0392b}.e2{stroke:#2471a3}.e3{stroke:#1e8449}"
      ".zero{stroke-dasharray:4 3}"
      "</style>\n";
  for (const auto& t : tiles) {
    out += "<g id=\"tile_" + std::to_string(t.s.m) + "_" + std::to_string(t.s.n) + "\">\n";
    for (int f = 0; f < mesh.n_faces(); ++f) {
      const auto& c = t.corners[f];
      out += "<polygon class=\"tri\" data-face=\"" + std::to_string(f) + "\" points=\"";
      for (int a = 0; a < 3; ++a)
        out += num(c[a].real()) + "," + num(c[a].imag()) + (a < 2 ? " " : "");
      out += "\"/>\n";
    }
    for (int f = 0; f < mesh.n_faces(); ++f) {
      const auto& [centre, r] = t.circles[f];
      out += "<circle class=\"circ\" data-face=\"" + std::to_string(f) + "\" cx=\"" + num(centre.real()) +
             "\" cy=\"" + num(centre.imag()) + "\" r=\"" + num(r) + "\"/>\n";
    }
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const int h = mesh.edge_halfedge[e], f = TorusTriangulation::face(h), a = h % 3;
      const Complex p = t.corners[f][a], q = t.corners[f][(a + 1) % 3];
      const int cls = mesh.has_edge_classes() ? mesh.edge_class[e] : 0;
      std::string style = "e" + std::to_string(cls);
      if (pat.theta.theta[e] == 0.0) style += " zero";
      out += "<line class=\"" + style + "\" data-edge=\"" + std::to_string(e) + "\" x1=\"" + num(p.real()) +
             "\" y1=\"" + num(p.imag()) + "\" x2=\"" + num(q.real()) + "\" y2=\"" + num(q.imag()) + "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace circlepat
