#pragma once

// Circle patterns on affine tori: radius solve, layout, holonomy, cross ratios
// and conformal data.
//
// Lift conventions (see mesh.hpp): the reference lift of face f has its first
// vertex in D(0,0). Stepping from the lift of face(twin(h)) at translation d
// across h lands on face(h) at translation d + dual_crossing(h). Under the deck
// translation e_r the developed picture moves by rho_r, and circumradii scale by
// e^{A_r}, so u(lift at (m,n)) = u(reference) + m*A1 + n*A2.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Sparse>

#include "circlepat/mesh.hpp"

namespace circlepat {

struct HalfAngle {
  double angle = 0.0;
  bool degenerate = false;
};

/// Half of the central angle subtended by the chord shared with a neighbouring
/// circle meeting ours at angle theta, where du = u_self - u_neighbour.
inline HalfAngle face_half_angle(double du, double theta) {
  if (theta == 0.0) return {0.0, true};
  return {std::atan2(std::sin(theta), std::exp(du) - std::cos(theta)), false};
}

/// d(face_half_angle)/d(du); always <= 0.
inline double face_half_angle_slope(double du, double theta) {
  if (theta == 0.0) return 0.0;
  const double s = std::sin(theta), c = std::cos(theta), e = std::exp(du);
  return -s * e / ((e - c) * (e - c) + s * s);
}

// ---------------------------------------------------------------------------
// Radius system

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 100;
  std::vector<double> initial_u;  // per face, reference lifts; empty means u = 0
};

struct RadiusSolution {
  CellDecomposition cells;
  std::vector<double> cell_u;  // log radius of each cell in the lift chosen by cells.face_shift
  std::vector<double> u;       // per face, reference lift, sum zero
  int iterations = 0;
  double residual = 0.0;       // max over cells of |angle sum - pi|
};

namespace detail {

inline double shift_dot(Shift s, const Period& A) { return s.m * A[0] + s.n * A[1]; }

inline double cell_du(const TorusTriangulation& mesh, const CellDecomposition& cells,
                      const std::vector<double>& cell_u, const Period& A, int h) {
  const int f = TorusTriangulation::face(h);
  const int g = TorusTriangulation::face(mesh.twin[h]);
  return cell_u[cells.cell_of_face[f]] - cell_u[cells.cell_of_face[g]] +
         shift_dot(cells.dual_crossing(mesh, h), A);
}

}  // namespace detail

/// Angle defect per cell: sum over kept boundary halfedges of the half-angle, minus pi.
inline Eigen::VectorXd radii_residual(const TorusTriangulation& mesh, const AngleStructure& theta,
                                      const CellDecomposition& cells, const std::vector<double>& cell_u,
                                      const Period& A) {
  Eigen::VectorXd r = Eigen::VectorXd::Constant(cells.n_cells(), -kPi);
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    if (!cells.kept[mesh.edge_of[h]]) continue;
    const double du = detail::cell_du(mesh, cells, cell_u, A, h);
    r[cells.cell_of_face[TorusTriangulation::face(h)]] += face_half_angle(du, theta.at_halfedge(mesh, h)).angle;
  }
  return r;
}

inline Eigen::SparseMatrix<double> radii_jacobian_sparse(const TorusTriangulation& mesh,
                                                         const AngleStructure& theta,
                                                         const CellDecomposition& cells,
                                                         const std::vector<double>& cell_u, const Period& A) {
  std::vector<Eigen::Triplet<double>> entries;
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    if (!cells.kept[mesh.edge_of[h]]) continue;
    const double w = face_half_angle_slope(detail::cell_du(mesh, cells, cell_u, A, h), theta.at_halfedge(mesh, h));
    const int a = cells.cell_of_face[TorusTriangulation::face(h)];
    const int b = cells.cell_of_face[TorusTriangulation::face(mesh.twin[h])];
    entries.emplace_back(a, a, w);
    entries.emplace_back(a, b, -w);
  }
  Eigen::SparseMatrix<double> J(cells.n_cells(), cells.n_cells());
  J.setFromTriplets(entries.begin(), entries.end());
  return J;
}

/// Dense Jacobian of radii_residual with respect to the cell variables.
inline Eigen::MatrixXd radii_jacobian(const TorusTriangulation& mesh, const AngleStructure& theta,
                                      const CellDecomposition& cells, const std::vector<double>& cell_u,
                                      const Period& A) {
  return Eigen::MatrixXd(radii_jacobian_sparse(mesh, theta, cells, cell_u, A));
}

/// Damped Newton on the cell variables. Faces joined by zero-angle edges share
/// one variable; the result is normalized so that the face values sum to zero.
inline RadiusSolution solve_radii(const TorusTriangulation& mesh, const AngleStructure& theta, double A1,
                                  double A2, const SolveOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  {
    auto check = validate_angle_structure(mesh, theta, 0);
    if (auto* bad = check.report.first_failure()) throw Error(ErrorCode::InvalidAngles, bad->detail);
  }
  const Period A(A1, A2);
  RadiusSolution sol;
  sol.cells = build_cells(mesh, theta);
  const auto& cells = sol.cells;
  const int n = cells.n_cells();

  sol.cell_u.assign(n, 0.0);
  if (!opt.initial_u.empty()) {
    if (static_cast<int>(opt.initial_u.size()) != mesh.n_faces())
      throw Error(ErrorCode::InvalidArgument, "initial guess must have one value per face");
    for (int c = 0; c < n; ++c) {
      const int f = cells.cell_faces[c].front();
      sol.cell_u[c] = opt.initial_u[f] + detail::shift_dot(cells.face_shift[f], A);
    }
  }

  Eigen::VectorXd r = radii_residual(mesh, theta, cells, sol.cell_u, A);
  double norm = r.norm();
  int it = 0;
  while (r.cwiseAbs().maxCoeff() > opt.tol) {
    if (it == opt.max_iter) {
      std::ostringstream os;
      os.precision(3);
      os << "radius solve stopped after " << it << " iterations, residual " << r.cwiseAbs().maxCoeff();
      throw Error(ErrorCode::NonConvergence, os.str());
    }
    ++it;
    // -J is a positive semidefinite weighted Laplacian; pin cell 0.
    Eigen::SparseMatrix<double> L = -radii_jacobian_sparse(mesh, theta, cells, sol.cell_u, A);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
    if (n > 1) {
      Eigen::SparseMatrix<double> Lr = L.bottomRightCorner(n - 1, n - 1);
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Lr);
      if (ldlt.info() != Eigen::Success)
        throw Error(ErrorCode::NonConvergence, "radius Jacobian factorization failed");
      step.tail(n - 1) = ldlt.solve(r.tail(n - 1));
    }
    // Full step when it lowers the residual norm; otherwise an exact line
    // search on the concave potential whose gradient is the residual (its
    // directional derivative r.step decreases monotonically along the ray).
    std::vector<double> trial(n);
    auto at = [&](double s) {
      for (int c = 0; c < n; ++c) trial[c] = sol.cell_u[c] + s * step[c];
      return radii_residual(mesh, theta, cells, trial, A);
    };
    double t = 1.0;
    Eigen::VectorXd rt = at(1.0);
    if (!(rt.norm() < norm)) {
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        const double mid = 0.5 * (lo + hi);
        (at(mid).dot(step) > 0.0 ? lo : hi) = mid;
      }
      t = lo;
      rt = at(t);
      if (t == 0.0 || !(rt.norm() < norm)) {
        std::ostringstream os;
        os.precision(3);
        os << "line search stalled at iteration " << it << ", residual " << r.cwiseAbs().maxCoeff();
        throw Error(ErrorCode::NonConvergence, os.str());
      }
    }
    sol.cell_u = trial;
    r = rt;
    norm = r.norm();
  }
  sol.iterations = it;
  sol.residual = r.cwiseAbs().maxCoeff();

  sol.u.resize(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f)
    sol.u[f] = sol.cell_u[cells.cell_of_face[f]] - detail::shift_dot(cells.face_shift[f], A);
  const double mean = std::accumulate(sol.u.begin(), sol.u.end(), 0.0) / mesh.n_faces();
  for (double& x : sol.u) x -= mean;
  for (double& x : sol.cell_u) x -= mean;
  return sol;
}

// ---------------------------------------------------------------------------
// Layout

struct DevelopOptions {
  int root_face = 0;
  unsigned tree_seed = 0;  // nonzero shuffles the spanning-tree order
};

struct Development {
  std::vector<double> half_angle;  // per halfedge
  std::vector<Affine> placement;   // unit-circle frame of each face -> plane, reference lift
  std::vector<Complex> z;          // vertices of the D(0,0) lift
  Affine rho1, rho2;               // holonomy of gamma1, gamma2
  double B1 = 0.0, B2 = 0.0;
  bool euclidean = false;

  /// rho1^m o rho2^n
  Affine deck(Shift s) const { return rho1.pow(s.m).compose(rho2.pow(s.n)); }
  /// Position of vertex v in the lift D(s).
  Complex position(int v, Shift s) const { return deck(s)(z[v]); }
};

/// Half-angle of every halfedge: kept edges from the radius system, edges
/// inside merged cells by angle bookkeeping (face sums pi, opposite sides pi).
inline std::vector<double> half_angles(const TorusTriangulation& mesh, const AngleStructure& theta,
                                       const RadiusSolution& sol, const Period& A) {
  const int nh = mesh.n_halfedges();
  std::vector<double> out(nh, 0.0);
  std::vector<char> known(nh, 0);
  for (int h = 0; h < nh; ++h) {
    if (!sol.cells.kept[mesh.edge_of[h]]) continue;
    out[h] = face_half_angle(detail::cell_du(mesh, sol.cells, sol.cell_u, A, h), theta.at_halfedge(mesh, h)).angle;
    known[h] = 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int f = 0; f < mesh.n_faces(); ++f) {
      int missing = -1, count = 0;
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        if (known[3 * f + k]) {
          ++count;
          sum += out[3 * f + k];
        } else {
          missing = 3 * f + k;
        }
      }
      if (count == 2) {
        out[missing] = kPi - sum;
        known[missing] = 1;
        changed = true;
      }
    }
    for (int h = 0; h < nh; ++h) {
      const int t = mesh.twin[h];
      if (known[h] && !known[t]) {
        out[t] = kPi - out[h];
        known[t] = 1;
        changed = true;
      }
    }
  }
  for (int h = 0; h < nh; ++h)
    if (!known[h]) throw Error(ErrorCode::DegenerateLayout, "cannot resolve angles inside a merged cell");
  return out;
}

namespace detail {

/// Vertices of face f on the unit circle, corner by corner.
inline std::array<Complex, 3> unit_frame(const std::vector<double>& half, int f) {
  const double a0 = 2.0 * half[3 * f];
  const double a1 = a0 + 2.0 * half[3 * f + 1];
  return {Complex(1.0, 0.0), std::polar(1.0, a0), std::polar(1.0, a1)};
}

/// Placement of face(h) glued to the placed face(twin(h)).
inline Affine glue(const std::vector<double>& half, const Affine& placed, int h, int t) {
  const auto wf = unit_frame(half, h / 3);
  const auto wg = unit_frame(half, t / 3);
  const int kh = h % 3, kt = t % 3;
  const Complex q0 = placed(wg[(kt + 1) % 3]);  // tail(h)
  const Complex q1 = placed(wg[kt]);            // head(h)
  const Complex p0 = wf[kh], p1 = wf[(kh + 1) % 3];
  if (!(std::abs(q1 - q0) > 1e-280))
    throw Error(ErrorCode::DegenerateLayout, "chord of halfedge " + std::to_string(h) + " underflows");
  return Affine::from_points(p0, p1, q0, q1);
}

/// Continuous change of arg(z - center) along straight segments through the points.
inline double winding_angle(const std::vector<Complex>& pts, Complex center) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) total += std::arg((pts[k + 1] - center) / (pts[k] - center));
  return total;
}

}  // namespace detail

inline Development develop(const TorusTriangulation& mesh, const AngleStructure& theta, const RadiusSolution& sol,
                           double A1, double A2, const DevelopOptions& opt = {}) {
  const Period A(A1, A2);
  const int nf = mesh.n_faces();
  if (opt.root_face < 0 || opt.root_face >= nf) throw Error(ErrorCode::InvalidArgument, "root face out of range");
  Development dev;
  dev.euclidean = A1 == 0.0 && A2 == 0.0;
  dev.half_angle = half_angles(mesh, theta, sol, A);
  const auto& half = dev.half_angle;

  // Spanning-tree layout; each face is placed in the lift at translation lift[f].
  std::vector<Affine> placed(nf);
  std::vector<Shift> lift(nf);
  std::vector<char> seen(nf, 0);
  std::mt19937 rng(opt.tree_seed);
  std::queue<int> frontier;
  frontier.push(opt.root_face);
  seen[opt.root_face] = 1;
  while (!frontier.empty()) {
    const int g = frontier.front();
    frontier.pop();
    std::array<int, 3> order{0, 1, 2};
    if (opt.tree_seed != 0) std::shuffle(order.begin(), order.end(), rng);
    for (int k : order) {
      const int t = 3 * g + k;
      const int h = mesh.twin[t];
      const int f = TorusTriangulation::face(h);
      if (seen[f]) continue;
      seen[f] = 1;
      placed[f] = detail::glue(half, placed[g], h, t);
      lift[f] = lift[g] + mesh.dual_crossing(h);
      frontier.push(f);
    }
  }

  auto holonomy = [&](const std::vector<int>& loop) {
    const int start = TorusTriangulation::face(mesh.twin[loop.front()]);
    Affine cur = placed[start];
    for (int h : loop) cur = detail::glue(half, cur, h, mesh.twin[h]);
    return cur.compose(placed[start].inverse());
  };
  dev.rho1 = holonomy(mesh.gamma1_dual);
  dev.rho2 = holonomy(mesh.gamma2_dual);

  dev.placement.resize(nf);
  for (int f = 0; f < nf; ++f) dev.placement[f] = dev.deck(-lift[f]).compose(placed[f]);

  dev.z.assign(mesh.n_vertices, Complex(0.0, 0.0));
  std::vector<char> have(mesh.n_vertices, 0);
  for (int f = 0; f < nf; ++f) {
    const auto w = detail::unit_frame(half, f);
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.faces[f][k];
      if (have[v]) continue;
      have[v] = 1;
      dev.z[v] = dev.deck(-mesh.offset(3 * f + k))(dev.placement[f](w[k]));
    }
  }

  if (!dev.euclidean) {
    // Rotation parts: winding of the developed primal loop around the common fixed point.
    auto rotation = [&](const std::vector<int>& loop, const Affine& rho) {
      const Complex center = rho.b / (1.0 - rho.a);
      std::vector<Complex> pts;
      Shift s;
      pts.push_back(dev.z[mesh.tail(loop.front())]);
      for (int h : loop) {
        s += mesh.crossing[h];
        pts.push_back(dev.position(mesh.head(h), s));
      }
      return detail::winding_angle(pts, center);
    };
    dev.B1 = rotation(mesh.gamma1_primal, dev.rho1);
    dev.B2 = rotation(mesh.gamma2_primal, dev.rho2);
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Cross ratios

/// X per edge from the developed positions, shifting the far vertex by the holonomy.
inline std::vector<Complex> cross_ratios(const TorusTriangulation& mesh, const Development& dev) {
  std::vector<Complex> X(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int h = mesh.edge_halfedge[e];
    const int t = mesh.twin[h];
    const int f = TorusTriangulation::face(h), g = TorusTriangulation::face(t);
    auto corner = [&](int face, int k, Shift base) {
      return dev.position(mesh.faces[face][k], base + mesh.offset(3 * face + k));
    };
    const int kh = h % 3, kt = t % 3;
    const Complex zi = corner(f, kh, {});
    const Complex zj = corner(f, (kh + 1) % 3, {});
    const Complex zk = corner(f, (kh + 2) % 3, {});
    const Complex zl = corner(g, (kt + 2) % 3, mesh.dual_crossing(t));
    const Complex den = (zi - zl) * (zj - zk);
    if (std::abs(zi - zl) == 0.0 || std::abs(zj - zk) == 0.0 || !std::isfinite(std::abs(den)))
      throw Error(ErrorCode::DegenerateCrossRatio, "coincident points at edge " + std::to_string(e));
    X[e] = -(zk - zi) * (zl - zj) / den;
  }
  return X;
}

struct CrossRatioResiduals {
  double product = 0.0;  // max_i |prod_j X_ij - 1|
  double sum = 0.0;      // max_i |X_i1 + X_i1 X_i2 + ...|
  double angle = 0.0;    // max_e |arg(X_e e^{-i Theta_e})|, or 0 without angles
};

/// Vertex equations with neighbours in clockwise order.
inline CrossRatioResiduals cross_ratio_residuals(const TorusTriangulation& mesh, const std::vector<Complex>& X,
                                                 const AngleStructure* theta = nullptr) {
  CrossRatioResiduals out;
  for (const auto& ring : mesh.vertex_rings()) {
    Complex prod(1.0, 0.0), sum(0.0, 0.0);
    for (int h : ring) {
      prod *= X[mesh.edge_of[h]];
      sum += prod;
    }
    out.product = std::max(out.product, std::abs(prod - 1.0));
    out.sum = std::max(out.sum, std::abs(sum));
  }
  if (theta)
    for (int e = 0; e < mesh.n_edges(); ++e)
      out.angle = std::max(out.angle, std::abs(std::arg(X[e] * std::polar(1.0, -theta->theta[e]))));
  return out;
}

// ---------------------------------------------------------------------------
// Conformal data

struct ConformalData {
  Complex c{0.0, 0.0};
  Complex tau{0.0, 1.0};
};

inline ConformalData conformal_data(double A1, double A2, const Development& dev) {
  ConformalData out;
  if (dev.euclidean) {
    const Complex b1 = dev.rho1.b, b2 = dev.rho2.b;
    if (!(std::abs(b1) > 0.0)) throw Error(ErrorCode::EuclideanDegenerate, "translation beta1 vanishes");
    out.tau = b2 / b1;
  } else {
    out.c = Complex(A1, dev.B1);
    out.tau = Complex(A2, dev.B2) / out.c;
  }
  if (!(out.tau.imag() > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "Im tau = " << out.tau.imag() << " is not positive";
    throw Error(ErrorCode::BranchError, os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Everything together

struct CirclePattern {
  TorusTriangulation mesh;
  AngleStructure theta;
  Period A{0.0, 0.0};
  RadiusSolution radii;
  Development dev;
  std::vector<Complex> X;
  ConformalData conformal;

  const std::vector<double>& u() const { return radii.u; }
  const std::vector<Complex>& z() const { return dev.z; }
  double B1() const { return dev.B1; }
  double B2() const { return dev.B2; }
  bool euclidean() const { return dev.euclidean; }
  Complex c() const { return conformal.c; }
  Complex tau() const { return conformal.tau; }
  /// Circumradius of the reference lift of face f in the developed picture.
  double radius(int f) const { return std::abs(dev.placement[f].a); }
};

inline CirclePattern make_pattern(const TorusTriangulation& mesh, const AngleStructure& theta, double A1, double A2,
                                  const SolveOptions& solve = {}, const DevelopOptions& layout = {}) {
  require_valid(mesh);
  CirclePattern p;
  p.mesh = mesh;
  p.theta = theta;
  p.A = Period(A1, A2);
  p.radii = solve_radii(mesh, theta, A1, A2, solve);
  p.dev = develop(mesh, theta, p.radii, A1, A2, layout);
  p.X = cross_ratios(mesh, p.dev);
  p.conformal = conformal_data(A1, A2, p.dev);
  return p;
}

}  // namespace circlepat
