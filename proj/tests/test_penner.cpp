#include <gtest/gtest.h>

#include <random>

#include "circlepat/penner.hpp"

using namespace circlepat;

namespace {

std::vector<double> random_vec(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

std::vector<double> add(std::vector<double> a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

// Flanking edges of e straight from the face lists: the other two edges of
// each adjacent triangle.
std::vector<int> flanking(const TorusTriangulation& mesh, int e) {
  std::vector<int> out;
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    if (mesh.edge_of[h] != e) continue;
    const int f = h / 3;
    for (int k = 0; k < 3; ++k)
      if (3 * f + k != h) out.push_back(mesh.edge_of[3 * f + k]);
  }
  return out;
}

}  // namespace

TEST(LiftMap, ConstantHasZeroImage) {
  auto mesh = build_lattice_torus(4, 4);
  for (double x : lift_map_h(mesh, std::vector<double>(mesh.n_edges(), 2.5))) EXPECT_EQ(x, 0.0);
}

TEST(LiftMap, Locality) {
  auto mesh = build_lattice_torus(4, 4);
  for (int e : {0, 7, 29}) {
    std::vector<double> a(mesh.n_edges(), 0.0);
    a[e] = 1.0;
    const auto x = lift_map_h(mesh, a);
    int nonzero = 0;
    for (int g = 0; g < mesh.n_edges(); ++g) {
      const auto fl = flanking(mesh, g);
      const bool flanked = std::find(fl.begin(), fl.end(), e) != fl.end();
      if (!flanked) EXPECT_EQ(x[g], 0.0);
      if (x[g] != 0.0) ++nonzero;
    }
    EXPECT_LE(nonzero, 4);
    EXPECT_GT(nonzero, 0);
  }
}

TEST(LiftMap, RangeLiesInW) {
  std::mt19937 rng(1);
  for (auto [p, q] : {std::pair{4, 4}, {3, 5}}) {
    auto mesh = build_lattice_torus(p, q);
    for (int k = 0; k < 5; ++k) EXPECT_LE(w_residual(mesh, lift_map_h(mesh, random_vec(mesh.n_edges(), rng))), 1e-12);
  }
}

TEST(LiftMap, MatrixAgreesWithMap) {
  std::mt19937 rng(4);
  auto mesh = build_lattice_torus(3, 5);
  const auto H = lift_matrix(mesh);
  const auto a = random_vec(mesh.n_edges(), rng);
  const auto x = lift_map_h(mesh, a);
  const Eigen::VectorXd hx = H * Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  for (int e = 0; e < mesh.n_edges(); ++e) EXPECT_NEAR(hx[e], x[e], 1e-14);
}

TEST(LiftMap, HorocycleChangesAreKernel) {
  std::mt19937 rng(8);
  auto mesh = build_lattice_torus(4, 4);
  const auto x = lift_map_h(mesh, horocycle_change(mesh, random_vec(mesh.n_vertices, rng)));
  for (double v : x) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(LiftInverse, RoundTripAndMinimumNorm) {
  std::mt19937 rng(9);
  auto mesh = build_lattice_torus(4, 4);
  for (double v : lift_inverse(mesh, std::vector<double>(mesh.n_edges(), 0.0))) EXPECT_EQ(v, 0.0);
  const auto a0 = random_vec(mesh.n_edges(), rng);
  const auto x = lift_map_h(mesh, a0);
  const auto a = lift_inverse(mesh, x);
  const auto back = lift_map_h(mesh, a);
  double na = 0, na0 = 0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    EXPECT_NEAR(back[e], x[e], 1e-10);
    na += a[e] * a[e];
    na0 += a0[e] * a0[e];
  }
  EXPECT_LE(na, na0 + 1e-12);
  // Minimum norm: orthogonal to the horocycle directions.
  for (int v = 0; v < mesh.n_vertices; ++v) {
    std::vector<double> s(mesh.n_vertices, 0.0);
    s[v] = 1.0;
    const auto k = horocycle_change(mesh, s);
    double dot = 0;
    for (int e = 0; e < mesh.n_edges(); ++e) dot += k[e] * a[e];
    EXPECT_NEAR(dot, 0.0, 1e-10);
  }
}

TEST(LiftInverse, RejectsOutsideW) {
  auto mesh = build_lattice_torus(4, 4);
  std::vector<double> x(mesh.n_edges(), 0.0);
  x[3] = 1.0;
  try {
    lift_inverse(mesh, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInW);
  }
}

TEST(PennerForm, Antisymmetric) {
  std::mt19937 rng(10);
  auto mesh = build_lattice_torus(4, 4);
  for (int k = 0; k < 5; ++k) {
    const auto a = random_vec(mesh.n_edges(), rng), b = random_vec(mesh.n_edges(), rng);
    EXPECT_NEAR(penner_form(mesh, a, a), 0.0, 1e-12);
    EXPECT_NEAR(penner_form(mesh, a, b), -penner_form(mesh, b, a), 1e-12);
  }
}

TEST(PennerForm, Bilinear) {
  std::mt19937 rng(12);
  auto mesh = build_lattice_torus(3, 5);
  const auto a = random_vec(mesh.n_edges(), rng), b = random_vec(mesh.n_edges(), rng),
             c = random_vec(mesh.n_edges(), rng);
  auto scaled = a;
  for (double& v : scaled) v *= -3.0;
  EXPECT_NEAR(penner_form(mesh, add(a, c), b), penner_form(mesh, a, b) + penner_form(mesh, c, b), 1e-12);
  EXPECT_NEAR(penner_form(mesh, scaled, b), -3.0 * penner_form(mesh, a, b), 1e-12);
}

TEST(PennerForm, CyclicRelabelingInvariant) {
  std::mt19937 rng(13);
  auto mesh = build_lattice_torus(4, 4);
  auto rotated = mesh;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& v = mesh.faces[f];
    rotated.faces[f] = {v[1], v[2], v[0]};
    for (int k = 0; k < 3; ++k) rotated.crossing[3 * f + k] = mesh.crossing[3 * f + (k + 1) % 3];
  }
  link_halfedges(rotated);
  std::vector<int> perm(mesh.n_edges());  // original edge -> rotated edge
  for (int f = 0; f < mesh.n_faces(); ++f)
    for (int k = 0; k < 3; ++k) perm[mesh.edge_of[3 * f + k]] = rotated.edge_of[3 * f + (k + 2) % 3];
  const auto a = random_vec(mesh.n_edges(), rng), b = random_vec(mesh.n_edges(), rng);
  std::vector<double> ra(mesh.n_edges()), rb(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    ra[perm[e]] = a[e];
    rb[perm[e]] = b[e];
  }
  EXPECT_NEAR(penner_form(rotated, ra, rb), penner_form(mesh, a, b), 1e-12);
}

TEST(PennerForm, LiftIndependence) {
  std::mt19937 rng(14);
  auto mesh = build_lattice_torus(4, 4);
  auto unit = [&] {
    auto v = random_vec(mesh.n_edges(), rng);
    double n = 0;
    for (double x : v) n += x * x;
    for (double& x : v) x /= std::sqrt(n);
    return v;
  };
  const auto a = lift_inverse(mesh, lift_map_h(mesh, unit()));
  const auto b = lift_inverse(mesh, lift_map_h(mesh, unit()));
  const double base = penner_form(mesh, a, b);
  for (int k = 0; k < 5; ++k) {
    const auto ka = horocycle_change(mesh, random_vec(mesh.n_vertices, rng));
    const auto kb = horocycle_change(mesh, random_vec(mesh.n_vertices, rng));
    EXPECT_NEAR(penner_form(mesh, add(a, ka), b), base, 1e-10);
    EXPECT_NEAR(penner_form(mesh, a, add(b, kb)), base, 1e-10);
    EXPECT_NEAR(penner_form(mesh, add(a, ka), add(b, kb)), base, 1e-10);
  }
}

TEST(ShearTangent, ZeroDirectionAndW) {
  auto mesh = build_lattice_torus(4, 4);
  auto theta = uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3);
  for (double x : shear_tangent_fd(mesh, theta, 0.5, 0.2, {0, 0}, 1e-4)) EXPECT_EQ(x, 0.0);
  EXPECT_LE(w_residual(mesh, shear_tangent_fd(mesh, theta, 0.5, 0.2, {1, 0}, 1e-4)), 1e-7);
}

TEST(ShearTangent, SecondOrderConvergence) {
  // Steps large enough that truncation dominates solver noise.
  auto mesh = build_lattice_torus(4, 4);
  auto theta = uniform_angle_structure(mesh, kPi / 2, kPi / 4, kPi / 4);
  const auto x1 = shear_tangent_fd(mesh, theta, 0.5, 0.2, {1, 0}, 4e-2);
  const auto x2 = shear_tangent_fd(mesh, theta, 0.5, 0.2, {1, 0}, 2e-2);
  const auto x4 = shear_tangent_fd(mesh, theta, 0.5, 0.2, {1, 0}, 1e-2);
  int checked = 0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const double d4 = x2[e] - x4[e];
    if (std::abs(d4) < 1e-9) continue;
    const double ratio = (x1[e] - x2[e]) / d4;
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Crosscheck, Antisymmetry) {
  auto mesh = build_lattice_torus(4, 4);
  auto theta = uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3);
  auto pat = make_pattern(mesh, theta, 0.5, 0.2);
  auto same = crosscheck_pullback(pat, {1, 0}, {1, 0}, 1e-4);
  EXPECT_NEAR(same.via_penner, 0.0, 1e-10);
  EXPECT_EQ(same.via_holonomy, 0.0);
  auto pq = crosscheck_pullback(pat, {1, 0}, {0, 1}, 1e-4);
  auto qp = crosscheck_pullback(pat, {0, 1}, {1, 0}, 1e-4);
  EXPECT_NEAR(pq.via_penner, -qp.via_penner, 1e-12);
  EXPECT_EQ(pq.via_holonomy, -qp.via_holonomy);
}

TEST(Crosscheck, PennerEqualsHalfOfHolonomyExpression) {
  // Measured relation: penner_form = omega(p,q) - omega(h p, h q), i.e.
  // exactly half of via_holonomy.
  auto mesh = build_lattice_torus(4, 4);
  for (auto t : {std::array{kPi / 3, kPi / 3, kPi / 3}, std::array{kPi / 2, kPi / 4, kPi / 4}}) {
    auto theta = uniform_angle_structure(mesh, t[0], t[1], t[2]);
    for (auto [a1, a2] : {std::pair{0.5, 0.2}, {-1.0, 1.0}}) {
      auto r = crosscheck_pullback(mesh, theta, a1, a2, {1, 0}, {0, 1}, 1e-4);
      EXPECT_NEAR(r.ratio, 2.0, 1e-6);
    }
  }
}

TEST(Crosscheck, FullTriangulationWithZeroAngles) {
  auto mesh = build_lattice_torus(4, 4);
  auto theta = uniform_angle_structure(mesh, kPi / 2, kPi / 2, 0.0);
  auto r = crosscheck_pullback(mesh, theta, 0.5, 0.2, {1, 0}, {0, 1}, 1e-4);
  EXPECT_TRUE(std::isfinite(r.via_penner));
  EXPECT_GT(std::abs(r.via_penner), 0.0);
}

TEST(BDerivative, MatchesPeriodMap) {
  auto mesh = build_lattice_torus(4, 4);
  auto theta = uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3);
  auto pat = make_pattern(mesh, theta, 0.5, 0.2);
  auto c1 = predicted_B_derivative_check(pat, {1, 0}, 1e-4);
  auto c2 = predicted_B_derivative_check(pat, {0, 1}, 1e-4);
  auto c12 = predicted_B_derivative_check(pat, {1, 1}, 1e-4);
  EXPECT_LE(c1.relerr, 1e-3);
  EXPECT_LE(c2.relerr, 1e-3);
  EXPECT_LE((c12.predicted - c1.predicted - c2.predicted).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(predicted_B_derivative_check(make_pattern(mesh, theta, 0, 0), {1, 0}, 1e-4), Error);
}
