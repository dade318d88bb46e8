#pragma once

// Triangular-lattice tori with classwise constant angles: the explicit
// two-parameter family of cross ratios and the Penner form at the Euclidean point.

#include <cmath>
#include <sstream>
#include <vector>

#include "circlepat/penner.hpp"

namespace circlepat {

struct TriLatticeFamily {
  std::array<double, 3> theta{kPi / 3, kPi / 3, kPi / 3};
  double alpha = 1.0, beta = 1.0;

  /// X on edges of class 1, 2, 3.
  Complex value(int cls) const {
    switch (cls) {
      case 1: return std::polar(alpha, theta[0]);
      case 2: return std::polar(beta, theta[1]);
      case 3: return std::polar(1.0 / (alpha * beta), theta[2]);
    }
    throw Error(ErrorCode::InvalidArgument, "edge class must be 1, 2 or 3");
  }
};

namespace detail {

inline void check_lattice_inputs(const TorusTriangulation& mesh, const std::array<double, 3>& t) {
  if (!mesh.has_edge_classes()) throw Error(ErrorCode::MissingEdgeClasses, "mesh carries no edge class tags");
  for (double x : t)
    if (!(x >= 0.0 && x < kPi)) throw Error(ErrorCode::InvalidAngles, "class angles must lie in [0, pi)");
  if (std::abs(t[0] + t[1] + t[2] - kPi) > 1e-12)
    throw Error(ErrorCode::InvalidAngles, "class angles must sum to pi");
}

}  // namespace detail

inline std::vector<Complex> family_cross_ratios(const TorusTriangulation& mesh, const TriLatticeFamily& fam) {
  detail::check_lattice_inputs(mesh, fam.theta);
  if (!(fam.alpha > 0.0 && fam.beta > 0.0))
    throw Error(ErrorCode::InvalidArgument, "alpha and beta must be positive");
  std::vector<Complex> X(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) X[e] = fam.value(mesh.edge_class[e]);
  const auto r = cross_ratio_residuals(mesh, X);
  if (!(r.product <= 1e-12 && r.sum <= 1e-12)) {
    std::ostringstream os;
    os.precision(3);
    os << "family violates the vertex equations: product " << r.product << ", sum " << r.sum;
    throw Error(ErrorCode::CheckFailed, os.str());
  }
  return X;
}

struct FamilyFit {
  double alpha = 0.0, beta = 0.0;
  double spread = 0.0;  // max classwise deviation of |X| from the fitted family
};

/// Reads (alpha, beta) off classes 1 and 2 and measures how far X is from the family.
inline FamilyFit fit_family(const TorusTriangulation& mesh, const std::vector<Complex>& X) {
  if (!mesh.has_edge_classes()) throw Error(ErrorCode::MissingEdgeClasses, "mesh carries no edge class tags");
  FamilyFit out;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.edge_class[e] == 1 && out.alpha == 0.0) out.alpha = std::abs(X[e]);
    if (mesh.edge_class[e] == 2 && out.beta == 0.0) out.beta = std::abs(X[e]);
  }
  const double m[3] = {out.alpha, out.beta, 1.0 / (out.alpha * out.beta)};
  for (int e = 0; e < mesh.n_edges(); ++e)
    out.spread = std::max(out.spread, std::abs(std::abs(X[e]) - m[mesh.edge_class[e] - 1]));
  return out;
}

/// (alpha, beta) of the pattern with translation holonomy.
inline FamilyFit euclidean_point(const TorusTriangulation& mesh, const std::array<double, 3>& t,
                                 const SolveOptions& opt = {}) {
  detail::check_lattice_inputs(mesh, t);
  const auto pat = make_pattern(mesh, uniform_angle_structure(mesh, t[0], t[1], t[2]), 0.0, 0.0, opt);
  const auto fit = fit_family(mesh, pat.X);
  if (!(fit.spread <= 1e-10)) {
    std::ostringstream os;
    os.precision(3);
    os << "cross ratios are not classwise constant: spread " << fit.spread;
    throw Error(ErrorCode::CheckFailed, os.str());
  }
  return fit;
}

struct EuclideanPullback {
  FamilyFit point;
  Matrix2 matrix = Matrix2::Zero();  // on (d/dlog alpha, d/dlog beta)
  double off_diagonal = 0.0;
  double det = 0.0;
};

/// x for d/dlog alpha (which = 0) or d/dlog beta (which = 1).
inline std::vector<double> family_tangent(const TorusTriangulation& mesh, int which) {
  const double by_class[2][3] = {{1.0, 0.0, -1.0}, {0.0, 1.0, -1.0}};
  std::vector<double> x(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) x[e] = by_class[which][mesh.edge_class[e] - 1];
  return x;
}

inline EuclideanPullback euclidean_pullback(const TorusTriangulation& mesh, const std::array<double, 3>& t,
                                            const SolveOptions& opt = {}) {
  EuclideanPullback out;
  out.point = euclidean_point(mesh, t, opt);
  const std::array<std::vector<double>, 2> a{lift_inverse(mesh, family_tangent(mesh, 0)),
                                             lift_inverse(mesh, family_tangent(mesh, 1))};
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) out.matrix(r, s) = penner_form(mesh, a[r], a[s]);
  out.off_diagonal = out.matrix(0, 1);
  out.det = out.matrix.determinant();
  if (!(std::abs(out.off_diagonal) > 1e-6))
    throw Error(ErrorCode::CheckFailed, "pullback form degenerates at the Euclidean point");
  return out;
}

}  // namespace circlepat
