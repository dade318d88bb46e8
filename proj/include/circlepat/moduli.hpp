#pragma once

// Holonomy-based pullback of the Weil-Petersson form, the map (A1, A2) -> tau,
// the degree check on half circles, and the boundedness sweep of Im c, Im(c tau).

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "circlepat/hodge.hpp"
#include "circlepat/period_space.hpp"

namespace circlepat {

struct PullbackForm {
  double lambda = 0.0;         // 2 (1 - det h_X)
  Matrix2 matrix = Matrix2::Zero();  // lambda * [[0, 1], [-1, 0]]
  double det_hx = 0.0;
  double imaginary_part = 0.0;  // max |omega(h p, q) + omega(p, h q)| over basis pairs
  PeriodMatrix hx;

  /// (1/2) f*omega_P evaluated on period vectors p, q.
  double half_form(const Period& p, const Period& q) const { return omega(p, q) - omega(hx * p, hx * q); }
};

inline PullbackForm pullback_form(const CirclePattern& pat) {
  if (pat.euclidean())
    throw Error(ErrorCode::EuclideanPoint, "the holonomy formula does not apply at the Euclidean point");
  PullbackForm out;
  out.hx = period_map(pat);
  out.det_hx = out.hx.det();
  out.lambda = 2.0 * (1.0 - out.det_hx);
  out.matrix << 0.0, out.lambda, -out.lambda, 0.0;
  const std::array<Period, 2> basis{Period(1, 0), Period(0, 1)};
  for (const auto& p : basis)
    for (const auto& q : basis)
      out.imaginary_part = std::max(out.imaginary_part, std::abs(omega(out.hx * p, q) + omega(p, out.hx * q)));
  const double scale = std::max(1.0, out.hx.m.cwiseAbs().maxCoeff());
  if (!(out.imaginary_part <= 1e-9 * scale)) {
    std::ostringstream os;
    os.precision(3);
    os << "reciprocity fails: |omega(h p, q) + omega(p, h q)| = " << out.imaginary_part;
    throw Error(ErrorCode::CheckFailed, os.str());
  }
  return out;
}

inline Complex tau_of(const TorusTriangulation& mesh, const AngleStructure& theta, double A1, double A2,
                      const SolveOptions& opt = {}) {
  return make_pattern(mesh, theta, A1, A2, opt).tau();
}

/// Unit-disk chart of the upper half plane.
inline Complex disk_chart(Complex z) { return (z - Complex(0, 1)) / (z + Complex(0, 1)); }

struct WindingResult {
  int winding = 0;
  double total_angle = 0.0;  // continuous change of arg(w - w*)
  double closure = 0.0;      // |w_n - w_0|
  Complex tau_euclidean;     // tau at (0, 0), the puncture the loop winds around
  std::vector<Complex> w;    // disk-chart images of the samples
};

/// Winding of t -> g(tau(R cos t, R sin t)), t in [0, pi], around g(tau at the origin).
inline WindingResult winding_check(const TorusTriangulation& mesh, const AngleStructure& theta, double R, int n,
                                   const SolveOptions& opt = {}) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  if (n < 64) throw Error(ErrorCode::InvalidArgument, "winding needs at least 64 samples");
  WindingResult out;
  out.tau_euclidean = tau_of(mesh, theta, 0.0, 0.0, opt);
  const Complex center = disk_chart(out.tau_euclidean);
  for (int k = 0; k <= n; ++k) {
    const double t = kPi * k / n;
    out.w.push_back(disk_chart(tau_of(mesh, theta, R * std::cos(t), R * std::sin(t), opt)));
  }
  for (int k = 0; k < n; ++k) {
    const Complex ratio = (out.w[k + 1] - center) / (out.w[k] - center);
    if (!(std::abs(ratio - 1.0) < 1.0))
      throw Error(ErrorCode::UnwrapFailure,
                  "phase jump between samples " + std::to_string(k) + " and " + std::to_string(k + 1));
    out.total_angle += std::arg(ratio);
  }
  out.closure = std::abs(out.w[n] - out.w[0]);
  if (!(out.closure <= 1e-6)) {
    std::ostringstream os;
    os.precision(3);
    os << "loop does not close: |w_n - w_0| = " << out.closure;
    throw Error(ErrorCode::CheckFailed, os.str());
  }
  out.winding = static_cast<int>(std::lround(out.total_angle / (2.0 * kPi)));
  return out;
}

struct RaySample {
  double R = 0.0;
  Complex c, tau;
};

struct BoundednessReport {
  std::vector<RaySample> samples;
  double max_im_c = 0.0;
  double max_im_ctau = 0.0;
};

/// Samples (A1, A2) = R (cos phi, sin phi) and records |Im c| and |Im(c tau)|.
inline BoundednessReport boundedness_sweep(const TorusTriangulation& mesh, const AngleStructure& theta, double phi,
                                           const std::vector<double>& radii, const SolveOptions& opt = {}) {
  BoundednessReport out;
  for (double R : radii) {
    auto p = make_pattern(mesh, theta, R * std::cos(phi), R * std::sin(phi), opt);
    out.samples.push_back({R, p.c(), p.tau()});
    out.max_im_c = std::max(out.max_im_c, std::abs(p.c().imag()));
    out.max_im_ctau = std::max(out.max_im_ctau, std::abs((p.c() * p.tau()).imag()));
  }
  return out;
}

}  // namespace circlepat
