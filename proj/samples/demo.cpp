// Solves one circle pattern on a 4x4 lattice torus, prints its conformal
// data and the discrete period map, and writes a tiled SVG layout.

#include <cstdio>

#include "circlepat/circlepat.hpp"

int main(int argc, char** argv) {
  using namespace circlepat;
  const std::string svg_path = argc > 1 ? argv[1] : "demo.svg";
  try {
    const auto mesh = build_lattice_torus(4, 4);
    const auto theta = uniform_angle_structure(mesh, kPi / 2, kPi / 4, kPi / 4);
    const auto pat = make_pattern(mesh, theta, 0.5, 0.2);

    std::printf("newton iterations  %d (residual %.2e)\n", pat.radii.iterations, pat.radii.residual);
    std::printf("holonomy B         (%.6f, %.6f)\n", pat.B1(), pat.B2());
    std::printf("tau                %.6f + %.6fi\n", pat.tau().real(), pat.tau().imag());

    const auto hx = period_map(pat);
    std::printf("h_X                [[%.6f, %.6f], [%.6f, %.6f]]\n", hx.m(0, 0), hx.m(0, 1), hx.m(1, 0), hx.m(1, 1));
    std::printf("lambda             %.6e\n", pullback_form(pat).lambda);

    const auto tri = euclidean_pullback(mesh, {kPi / 2, kPi / 4, kPi / 4});
    std::printf("Euclidean point    alpha %.6f, beta %.6f, Penner entry %.3f\n", tri.point.alpha, tri.point.beta,
                tri.off_diagonal);

    write_text(svg_path, export_svg(pat, 2));
    std::printf("wrote %s\n", svg_path.c_str());
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
