#pragma once

// Tangent vectors of the punctured-torus Teichmueller space in shear (x) and
// lambda-length (a) coordinates, Penner's form, and its comparison with the
// holonomy formula on the image of the circle-pattern space.
//
// For edge e with reference halfedge h = i->j in face ijk and twin j->i in
// face jil: ki = prev(h), jk = next(h), il = next(twin), lj = prev(twin).

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "circlepat/moduli.hpp"

namespace circlepat {

/// x_ij = a_ki - a_il + a_lj - a_jk
inline std::vector<double> lift_map_h(const TorusTriangulation& mesh, const std::vector<double>& a) {
  std::vector<double> x(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int h = mesh.edge_halfedge[e], t = mesh.twin[h];
    auto A = [&](int g) { return a[mesh.edge_of[g]]; };
    x[e] = A(TorusTriangulation::prev(h)) - A(TorusTriangulation::next(t)) + A(TorusTriangulation::prev(t)) -
           A(TorusTriangulation::next(h));
  }
  return x;
}

inline Eigen::MatrixXd lift_matrix(const TorusTriangulation& mesh) {
  const int ne = mesh.n_edges();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(ne, ne);
  for (int e = 0; e < ne; ++e) {
    const int h = mesh.edge_halfedge[e], t = mesh.twin[h];
    H(e, mesh.edge_of[TorusTriangulation::prev(h)]) += 1.0;
    H(e, mesh.edge_of[TorusTriangulation::next(t)]) -= 1.0;
    H(e, mesh.edge_of[TorusTriangulation::prev(t)]) += 1.0;
    H(e, mesh.edge_of[TorusTriangulation::next(h)]) -= 1.0;
  }
  return H;
}

/// max over vertices of |sum of x over incident edges|.
inline double w_residual(const TorusTriangulation& mesh, const std::vector<double>& x) {
  std::vector<double> sum(mesh.n_vertices, 0.0);
  for (int h = 0; h < mesh.n_halfedges(); ++h) sum[mesh.tail(h)] += x[mesh.edge_of[h]];
  double out = 0.0;
  for (double s : sum) out = std::max(out, std::abs(s));
  return out;
}

/// Minimum-norm a with h(a) = x.
inline std::vector<double> lift_inverse(const TorusTriangulation& mesh, const std::vector<double>& x) {
  const double in_w = w_residual(mesh, x);
  if (!(in_w <= 1e-9)) {
    std::ostringstream os;
    os.precision(3);
    os << "vertex-sum residual " << in_w << " exceeds 1e-9";
    throw Error(ErrorCode::NotInW, os.str());
  }
  const Eigen::MatrixXd H = lift_matrix(mesh);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(H);
  const Eigen::VectorXd a = cod.solve(rhs);
  if ((H * a - rhs).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorCode::CheckFailed, "lift does not reproduce the shear tangent");
  return {a.data(), a.data() + a.size()};
}

/// Change of horocycles s: V -> R, a kernel element a_ij = s_i + s_j of h.
inline std::vector<double> horocycle_change(const TorusTriangulation& mesh, const std::vector<double>& s) {
  std::vector<double> a(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int h = mesh.edge_halfedge[e];
    a[e] = s[mesh.tail(h)] + s[mesh.head(h)];
  }
  return a;
}

/// -2 sum over faces ijk of a_ij(b_jk - b_ki) + a_jk(b_ki - b_ij) + a_ki(b_ij - b_jk)
inline double penner_form(const TorusTriangulation& mesh, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const int ij = mesh.edge_of[3 * f], jk = mesh.edge_of[3 * f + 1], ki = mesh.edge_of[3 * f + 2];
    s += a[ij] * (b[jk] - b[ki]) + a[jk] * (b[ki] - b[ij]) + a[ki] * (b[ij] - b[jk]);
  }
  return -2.0 * s;
}

/// Central difference of log|X| along dir.
inline std::vector<double> shear_tangent_fd(const TorusTriangulation& mesh, const AngleStructure& theta, double A1,
                                            double A2, const Period& dir, double step, const SolveOptions& opt = {}) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  std::vector<double> x(mesh.n_edges(), 0.0);
  if (dir.isZero()) return x;
  auto plus = make_pattern(mesh, theta, A1 + step * dir[0], A2 + step * dir[1], opt);
  auto minus = make_pattern(mesh, theta, A1 - step * dir[0], A2 - step * dir[1], opt);
  for (int e = 0; e < mesh.n_edges(); ++e)
    x[e] = (std::log(std::abs(plus.X[e])) - std::log(std::abs(minus.X[e]))) / (2.0 * step);
  const double res = w_residual(mesh, x);
  if (!(res <= 10.0 * step * step)) {
    std::ostringstream os;
    os.precision(3);
    os << "finite-difference tangent leaves W: vertex residual " << res;
    throw Error(ErrorCode::CheckFailed, os.str());
  }
  return x;
}

struct Crosscheck {
  double via_penner = 0.0;
  double via_holonomy = 0.0;
  double relerr = 0.0;
  double ratio = 0.0;  // via_holonomy / via_penner
};

/// Penner's form on lifted finite-difference tangents against 2 (omega(p,q) - omega(h_X p, h_X q)).
inline Crosscheck crosscheck_pullback(const CirclePattern& pat, const Period& p, const Period& q, double step,
                                      const SolveOptions& opt = {}) {
  const auto pb = pullback_form(pat);
  Crosscheck out;
  out.via_holonomy = 2.0 * pb.half_form(p, q);
  const double A1 = pat.A[0], A2 = pat.A[1];
  const auto a = lift_inverse(pat.mesh, shear_tangent_fd(pat.mesh, pat.theta, A1, A2, p, step, opt));
  const auto b = lift_inverse(pat.mesh, shear_tangent_fd(pat.mesh, pat.theta, A1, A2, q, step, opt));
  out.via_penner = penner_form(pat.mesh, a, b);
  const double scale = std::max(std::abs(out.via_penner), std::abs(out.via_holonomy));
  out.relerr = scale == 0.0 ? 0.0 : std::abs(out.via_penner - out.via_holonomy) / scale;
  out.ratio = out.via_penner == 0.0 ? 0.0 : out.via_holonomy / out.via_penner;
  return out;
}

inline Crosscheck crosscheck_pullback(const TorusTriangulation& mesh, const AngleStructure& theta, double A1,
                                      double A2, const Period& p, const Period& q, double step,
                                      const SolveOptions& opt = {}) {
  return crosscheck_pullback(make_pattern(mesh, theta, A1, A2, opt), p, q, step, opt);
}

struct BDerivativeCheck {
  Period predicted;  // h_X p
  Period measured;   // central difference of (B1, B2)
  double relerr = 0.0;
};

inline BDerivativeCheck predicted_B_derivative_check(const CirclePattern& pat, const Period& p, double step,
                                                     const SolveOptions& opt = {}) {
  if (pat.euclidean()) throw Error(ErrorCode::EuclideanPoint, "B derivative check needs a non-Euclidean pattern");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  const double A1 = pat.A[0], A2 = pat.A[1];
  BDerivativeCheck out;
  out.predicted = period_map(pat) * p;
  auto plus = make_pattern(pat.mesh, pat.theta, A1 + step * p[0], A2 + step * p[1], opt);
  auto minus = make_pattern(pat.mesh, pat.theta, A1 - step * p[0], A2 - step * p[1], opt);
  out.measured = Period(plus.B1() - minus.B1(), plus.B2() - minus.B2()) / (2.0 * step);
  const double scale = out.predicted.norm();
  out.relerr = scale == 0.0 ? out.measured.norm() : (out.measured - out.predicted).norm() / scale;
  return out;
}

inline BDerivativeCheck predicted_B_derivative_check(const TorusTriangulation& mesh, const AngleStructure& theta,
                                                     double A1, double A2, const Period& p, double step,
                                                     const SolveOptions& opt = {}) {
  return predicted_B_derivative_check(make_pattern(mesh, theta, A1, A2, opt), p, step, opt);
}

}  // namespace circlepat
