#include <gtest/gtest.h>

#include <random>

#include "circlepat/hodge.hpp"

using namespace circlepat;

namespace {

struct Fixture {
  TorusTriangulation mesh;
  CirclePattern pat;
  EdgeWeights w;
};

Fixture make(int p, int q, std::array<double, 3> t, double A1, double A2) {
  Fixture f;
  f.mesh = build_lattice_torus(p, q);
  f.pat = make_pattern(f.mesh, uniform_angle_structure(f.mesh, t[0], t[1], t[2]), A1, A2);
  f.w = cotangent_weights(f.pat);
  return f;
}

const std::array<double, 3> kEqui{kPi / 3, kPi / 3, kPi / 3};
const std::array<double, 3> kRight{kPi / 2, kPi / 4, kPi / 4};
const std::array<double, 3> kFlat{kPi / 2, kPi / 2, 0.0};

}  // namespace

TEST(PeriodSpace, Omega) {
  EXPECT_EQ(omega({1, 0}, {0, 1}), 1.0);
  EXPECT_EQ(omega({2, 3}, {2, 3}), 0.0);
  EXPECT_EQ(omega({2, 3}, {5, 7}), -1.0);
}

TEST(PeriodSpace, HTauValues) {
  Matrix2 i_expected, one_plus_i;
  i_expected << 0, -1, 1, 0;
  one_plus_i << 1, -1, 2, -1;
  EXPECT_LE((h_tau({0, 1}) - i_expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((h_tau({1, 1}) - one_plus_i).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(h_tau({1, 0}), Error);
  EXPECT_THROW(h_tau({1, -1}), Error);
}

TEST(PeriodSpace, NormTau) {
  EXPECT_NEAR(norm_tau({0, 1}, {1, 0}), 1.0, 1e-15);
  EXPECT_NEAR(norm_tau({0, 1}, {3, -4}), 5.0, 1e-14);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-2, 2), y(0.1, 10);
  for (int k = 0; k < 200; ++k) {
    const Complex tau(d(rng), y(rng));
    const Period p(d(rng), d(rng));
    EXPECT_GT(inner_tau(tau, p, p), 0.0);
  }
}

TEST(PeriodSpace, HTauIdentities) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> x(-3, 3), y(0.1, 10);
  for (int k = 0; k < 100; ++k) {
    const Complex tau(x(rng), y(rng));
    const Matrix2 h = h_tau(tau);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    EXPECT_LE((h * h + Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-12 * scale * scale);
    EXPECT_NEAR(h.determinant(), 1.0, 1e-12 * scale * scale);
    EXPECT_NEAR(h.trace(), 0.0, 1e-12 * scale);
    const Period p(x(rng), x(rng)), q(x(rng), x(rng));
    EXPECT_NEAR(omega(h * p, h * q), omega(p, q), 1e-12 * scale * scale * 10);
  }
}

TEST(CotangentWeights, Equilateral) {
  auto f = make(4, 4, kEqui, 0.0, 0.0);
  for (double a : f.w.corner) EXPECT_NEAR(a, kPi / 3, 1e-12);
  for (double c : f.w.c) EXPECT_NEAR(c, 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(CotangentWeights, AngleBookkeeping) {
  for (auto t : {kEqui, kRight, kFlat}) {
    auto f = make(4, 4, t, 0.5, -0.3);
    const auto& theta = f.pat.theta;
    for (int e = 0; e < f.mesh.n_edges(); ++e) {
      const int h = f.mesh.edge_halfedge[e];
      EXPECT_NEAR(f.w.corner[h] + f.w.corner[f.mesh.twin[h]] + theta.theta[e], kPi, 1e-10);
      if (theta.theta[e] == 0.0) {
        EXPECT_FALSE(f.w.kept[e]);
      } else {
        EXPECT_GT(f.w.c[e], 0.0);
      }
    }
  }
}

TEST(CotangentWeights, ZeroAngleClassMergesCells) {
  auto f = make(4, 4, kFlat, 0.4, 0.1);
  EXPECT_EQ(f.w.cells.n_cells(), f.mesh.n_faces() / 2);
  for (int e = 0; e < f.mesh.n_edges(); ++e) EXPECT_EQ(f.w.kept[e] != 0, f.mesh.edge_class[e] != 3);
}

TEST(HarmonicForm, ZeroPeriodsGiveZero) {
  auto f = make(4, 4, kRight, 0.5, 0.2);
  auto eta = harmonic_oneform(f.mesh, f.w, {0, 0});
  for (double x : eta.eta) EXPECT_EQ(x, 0.0);
}

TEST(HarmonicForm, PeriodsAlongDifferentLoops) {
  for (auto t : {kEqui, kRight, kFlat}) {
    auto f = make(4, 4, t, 0.5, 0.2);
    auto eta = harmonic_oneform(f.mesh, f.w, {1, 0});
    EXPECT_NEAR(dual_period(f.mesh, eta, f.mesh.gamma1_dual), 1.0, 1e-10);
    EXPECT_NEAR(dual_period(f.mesh, eta, f.mesh.gamma2_dual), 0.0, 1e-10);
    for (int start : {3, 17, 30}) {
      EXPECT_NEAR(dual_period(f.mesh, eta, find_dual_loop(f.mesh, start, {1, 0})), 1.0, 1e-10);
      EXPECT_NEAR(dual_period(f.mesh, eta, find_dual_loop(f.mesh, start, {0, 1})), 0.0, 1e-10);
      EXPECT_NEAR(dual_period(f.mesh, eta, find_dual_loop(f.mesh, start, {1, 1})), 1.0, 1e-10);
    }
    EXPECT_LE(closed_residual(f.mesh, eta), 1e-10);
    EXPECT_LE(coclosed_residual(f.mesh, f.w, eta), 1e-10);
  }
}

TEST(HarmonicForm, ConjugatePeriodsArePathIndependent) {
  auto f = make(4, 4, kRight, 0.5, 0.2);
  auto eta = harmonic_oneform(f.mesh, f.w, {0.3, -1.2});
  const auto gens = primal_generators(f.mesh, f.w);
  const double b1 = primal_period(f.mesh, f.w, eta, gens[0]);
  const double b2 = primal_period(f.mesh, f.w, eta, gens[1]);
  for (int v : {0, 6, 13}) {
    EXPECT_NEAR(primal_period(f.mesh, f.w, eta, find_primal_loop(f.mesh, v, {1, 0})), b1, 1e-10);
    EXPECT_NEAR(primal_period(f.mesh, f.w, eta, find_primal_loop(f.mesh, v, {0, 1})), b2, 1e-10);
  }
}

TEST(HarmonicForm, Linearity) {
  auto f = make(4, 4, kEqui, 0.5, 0.2);
  auto a = harmonic_oneform(f.mesh, f.w, {0.7, 0.1});
  auto b = harmonic_oneform(f.mesh, f.w, {-0.2, 1.3});
  auto ab = harmonic_oneform(f.mesh, f.w, {0.5, 1.4});
  for (int h = 0; h < f.mesh.n_halfedges(); ++h) EXPECT_NEAR(ab.eta[h], a.eta[h] + b.eta[h], 1e-12);
}

TEST(HarmonicForm, Antisymmetric) {
  auto f = make(3, 5, kRight, -0.4, 0.9);
  auto eta = harmonic_oneform(f.mesh, f.w, {1.0, 2.0});
  for (int h = 0; h < f.mesh.n_halfedges(); ++h) EXPECT_EQ(eta.eta[f.mesh.twin[h]], -eta.eta[h]);
}

TEST(DirichletEnergy, QuadraticForm) {
  auto f = make(4, 4, kRight, 0.5, 0.2);
  DualOneForm zero{std::vector<double>(f.mesh.n_halfedges(), 0.0), f.w.kept};
  EXPECT_EQ(dirichlet_energy(f.mesh, f.w, zero), 0.0);
  auto eta = harmonic_oneform(f.mesh, f.w, {1, 0});
  auto twice = eta;
  for (double& x : twice.eta) x *= 2;
  EXPECT_NEAR(dirichlet_energy(f.mesh, f.w, twice), 4 * dirichlet_energy(f.mesh, f.w, eta), 1e-12);
}

TEST(PeriodMap, StructureOnSolvedPatterns) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (auto t : {kEqui, kRight, kFlat}) {
    for (auto [A1, A2] : {std::pair{0.5, 0.2}, {-1.0, 1.0}, {0.0, 1.0}}) {
      auto f = make(4, 4, t, A1, A2);
      auto hx = period_map(f.mesh, f.w);
      EXPECT_LE(std::abs(hx.trace()), 1e-10);
      for (auto p : {Period(1, 0), Period(0, 1), Period(1, 1)}) {
        const double energy = dirichlet_energy(f.mesh, f.w, harmonic_oneform(f.mesh, f.w, p));
        EXPECT_NEAR(omega(p, hx * p), energy, 1e-10);
        EXPECT_GT(omega(p, hx * p), 0.0);
      }
      for (int k = 0; k < 5; ++k) {
        const Period p(d(rng), d(rng)), q(d(rng), d(rng));
        EXPECT_NEAR(omega(p, hx * q), omega(q, hx * p), 1e-10);
      }
      EXPECT_LT(hx.det(), 1.0);
      EXPECT_GT(std::abs(hx.det()), 0.0);
      // Traceless: h^2 = -det * Id.
      EXPECT_LE((hx.m * hx.m + hx.det() * Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(PeriodMap, NormContraction) {
  auto f = make(4, 4, kRight, 0.5, 0.2);
  auto hx = period_map(f.mesh, f.w);
  for (int k = 0; k < 16; ++k) {
    const Period p(std::cos(2 * kPi * k / 16), std::sin(2 * kPi * k / 16));
    EXPECT_GT(norm_tau(f.pat.tau(), p) - norm_tau(f.pat.tau(), hx * p), 0.0);
  }
}

TEST(EnergyInequality, StrictAndQuadratic) {
  auto f = make(4, 4, kEqui, 0.5, 0.2);
  for (auto p : {Period(1, 0), Period(0, 1), Period(1, 1)}) {
    auto r = energy_inequality_check(f.pat, p);
    EXPECT_GT(r.margin, 0.0);
    auto r2 = energy_inequality_check(f.pat, 2 * p);
    EXPECT_NEAR(r2.margin, 4 * r.margin, 1e-9);
  }
  auto flat = make(4, 4, kEqui, 0.0, 0.0);
  EXPECT_THROW(energy_inequality_check(flat.pat, {1, 0}), Error);
}
