#pragma once

// Cotangent weights, discrete harmonic 1-forms and the discrete period map h_X.
//
// Orientation: the dual edge of halfedge h = i->j runs from the right face
// face(twin h) to the left face face(h), which is how dual loops are stored.
// A dual loop's period is the sum of eta(h) over its halfedges. Along a primal
// halfedge h the conjugate form eta/c is read with the dual edge turned a
// quarter clockwise, i.e. the primal period of h is eta(twin h)/c = -eta(h)/c.

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "circlepat/pattern.hpp"
#include "circlepat/period_space.hpp"

namespace circlepat {

struct EdgeWeights {
  std::vector<char> kept;       // per edge
  std::vector<double> c;        // per edge; 0 on removed edges
  std::vector<double> corner;   // per halfedge: developed angle at the vertex opposite h
  CellDecomposition cells;

  double at(const TorusTriangulation& mesh, int h) const { return c[mesh.edge_of[h]]; }
};

/// c_ij = (cot of the two angles opposite ij) / 2, from the developed triangles.
inline EdgeWeights cotangent_weights(const CirclePattern& pat) {
  const auto& mesh = pat.mesh;
  EdgeWeights w;
  w.cells = pat.radii.cells;
  w.kept = w.cells.kept;
  w.corner.resize(mesh.n_halfedges());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto frame = detail::unit_frame(pat.dev.half_angle, f);
    std::array<Complex, 3> z;
    for (int k = 0; k < 3; ++k) z[k] = pat.dev.placement[f](frame[k]);
    for (int k = 0; k < 3; ++k) {
      const Complex zi = z[k], zj = z[(k + 1) % 3], zk = z[(k + 2) % 3];
      w.corner[3 * f + k] = std::abs(std::arg((zi - zk) / (zj - zk)));
    }
  }
  w.c.assign(mesh.n_edges(), 0.0);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!w.kept[e]) continue;
    const int h = mesh.edge_halfedge[e];
    w.c[e] = 0.5 * (1.0 / std::tan(w.corner[h]) + 1.0 / std::tan(w.corner[mesh.twin[h]]));
  }
  return w;
}

struct DualOneForm {
  std::vector<double> eta;  // per halfedge, eta[twin h] = -eta[h]; zero on removed edges
  std::vector<char> kept;   // per edge

  double on_edge(const TorusTriangulation& mesh, int e) const { return eta[mesh.edge_halfedge[e]]; }
};

/// max over vertices of |sum of eta over outgoing kept halfedges|.
inline double closed_residual(const TorusTriangulation& mesh, const DualOneForm& form) {
  std::vector<double> sum(mesh.n_vertices, 0.0);
  for (int h = 0; h < mesh.n_halfedges(); ++h)
    if (form.kept[mesh.edge_of[h]]) sum[mesh.tail(h)] += form.eta[h];
  double out = 0.0;
  for (double s : sum) out = std::max(out, std::abs(s));
  return out;
}

/// max over cells of |sum of eta/c over the cell boundary|.
inline double coclosed_residual(const TorusTriangulation& mesh, const EdgeWeights& w, const DualOneForm& form) {
  std::vector<double> sum(w.cells.n_cells(), 0.0);
  for (int h = 0; h < mesh.n_halfedges(); ++h)
    if (w.kept[mesh.edge_of[h]]) sum[w.cells.cell_of_face[TorusTriangulation::face(h)]] += form.eta[h] / w.at(mesh, h);
  double out = 0.0;
  for (double s : sum) out = std::max(out, std::abs(s));
  return out;
}

/// Harmonic form with dual periods p: seed p1*m + p2*n from the dual crossings
/// between cell lifts, minus the differential of a cell function that makes it co-closed.
inline DualOneForm harmonic_oneform(const TorusTriangulation& mesh, const EdgeWeights& w, const Period& p) {
  const auto& cells = w.cells;
  const int n = cells.n_cells();
  const int nh = mesh.n_halfedges();
  std::vector<double> sigma(nh, 0.0);
  for (int h = 0; h < nh; ++h)
    if (w.kept[mesh.edge_of[h]]) sigma[h] = cells.dual_crossing(mesh, h).pair(p[0], p[1]);

  // sum over boundary of cell a: (F_a - F_b)/c = sum sigma/c
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int h = 0; h < nh; ++h) {
    if (!w.kept[mesh.edge_of[h]]) continue;
    const double k = 1.0 / w.at(mesh, h);
    const int a = cells.cell_of_face[TorusTriangulation::face(h)];
    const int b = cells.cell_of_face[TorusTriangulation::face(mesh.twin[h])];
    entries.emplace_back(a, a, k);
    entries.emplace_back(a, b, -k);
    rhs[a] += sigma[h] * k;
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(entries.begin(), entries.end());
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  if (n > 1) {
    Eigen::SparseMatrix<double> Lr = L.bottomRightCorner(n - 1, n - 1);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Lr);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SingularLaplacian, "cell Laplacian is singular");
    F.tail(n - 1) = ldlt.solve(rhs.tail(n - 1));
    if (ldlt.info() != Eigen::Success || !F.allFinite())
      throw Error(ErrorCode::SingularLaplacian, "cell Laplacian solve failed");
  }
  F.array() -= F.mean();

  DualOneForm out;
  out.kept = w.kept;
  out.eta.assign(nh, 0.0);
  for (int h = 0; h < nh; ++h) {
    if (!w.kept[mesh.edge_of[h]]) continue;
    out.eta[h] = sigma[h] - (F[cells.cell_of_face[TorusTriangulation::face(h)]] -
                             F[cells.cell_of_face[TorusTriangulation::face(mesh.twin[h])]]);
  }
  return out;
}

/// Period of eta along a dual loop (halfedges crossed right to left).
inline double dual_period(const TorusTriangulation& mesh, const DualOneForm& form, const std::vector<int>& loop) {
  double s = 0.0;
  for (int h : loop)
    if (form.kept[mesh.edge_of[h]]) s += form.eta[h];
  return s;
}

/// Period of the conjugate eta/c along a primal loop of kept halfedges.
inline double primal_period(const TorusTriangulation& mesh, const EdgeWeights& w, const DualOneForm& form,
                            const std::vector<int>& loop) {
  double s = 0.0;
  for (int h : loop) {
    if (!w.kept[mesh.edge_of[h]])
      throw Error(ErrorCode::InvalidArgument, "primal loop uses removed edge " + std::to_string(mesh.edge_of[h]));
    s -= form.eta[h] / w.at(mesh, h);
  }
  return s;
}

/// Generator loops of the cell decomposition: the mesh's own when they avoid removed edges.
inline std::array<std::vector<int>, 2> primal_generators(const TorusTriangulation& mesh, const EdgeWeights& w) {
  std::array<std::vector<int>, 2> out{mesh.gamma1_primal, mesh.gamma2_primal};
  const std::array<Shift, 2> target{Shift{1, 0}, Shift{0, 1}};
  for (int r = 0; r < 2; ++r) {
    const bool clean = std::all_of(out[r].begin(), out[r].end(), [&](int h) { return w.kept[mesh.edge_of[h]]; });
    if (clean) continue;
    out[r] = find_primal_loop(mesh, mesh.tail(out[r].front()), target[r], [&](int e) { return w.kept[e] != 0; });
    if (out[r].empty()) throw Error(ErrorCode::InvalidMesh, "no generator loop avoids the removed edges");
  }
  return out;
}

inline double dirichlet_energy(const TorusTriangulation& mesh, const EdgeWeights& w, const DualOneForm& form) {
  double s = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!w.kept[e]) continue;
    const double x = form.on_edge(mesh, e);
    s += x * x / w.c[e];
  }
  return s;
}

struct PeriodMatrix {
  enum class Kind { Discrete, Smooth };
  Matrix2 m = Matrix2::Zero();
  Kind kind = Kind::Discrete;

  double trace() const { return m.trace(); }
  double det() const { return m.determinant(); }
  Period operator*(const Period& p) const { return m * p; }
};

/// h_X: columns are the primal periods of eta/c for dual periods (1,0) and (0,1).
inline PeriodMatrix period_map(const TorusTriangulation& mesh, const EdgeWeights& w) {
  const auto loops = primal_generators(mesh, w);
  PeriodMatrix out;
  for (int col = 0; col < 2; ++col) {
    const auto form = harmonic_oneform(mesh, w, col == 0 ? Period(1.0, 0.0) : Period(0.0, 1.0));
    out.m(0, col) = primal_period(mesh, w, form, loops[0]);
    out.m(1, col) = primal_period(mesh, w, form, loops[1]);
  }
  return out;
}

inline PeriodMatrix period_map(const CirclePattern& pat) { return period_map(pat.mesh, cotangent_weights(pat)); }

struct EnergyInequality {
  double lhs = 0.0;  // discrete energy of eta_p
  double rhs = 0.0;  // smooth energy of the form whose conjugate has the periods of eta_p/c
  double margin = 0.0;
};

inline EnergyInequality energy_inequality_check(const CirclePattern& pat, const Period& p) {
  if (pat.euclidean()) throw Error(ErrorCode::EuclideanPoint, "energy inequality needs a non-Euclidean pattern");
  const auto w = cotangent_weights(pat);
  const auto hx = period_map(pat.mesh, w);
  EnergyInequality out;
  out.lhs = dirichlet_energy(pat.mesh, w, harmonic_oneform(pat.mesh, w, p));
  const Period b = hx * p;
  out.rhs = omega(b, h_tau(pat.tau()) * b);
  out.margin = out.lhs - out.rhs;
  return out;
}

}  // namespace circlepat
