#pragma once

// The period space R^2 of a torus: symplectic form and the harmonic-conjugate
// action of a conformal structure tau.

#include "circlepat/error.hpp"
#include "circlepat/types.hpp"

namespace circlepat {

inline double omega(const Period& p, const Period& q) { return p[0] * q[1] - p[1] * q[0]; }

/// Periods of the harmonic conjugate: b = h_tau a.
inline Matrix2 h_tau(Complex tau) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in the upper half plane");
  const double x = tau.real(), y = tau.imag();
  Matrix2 m;
  m << x / y, -1.0 / y, std::norm(tau) / y, -x / y;
  return m;
}

inline double inner_tau(Complex tau, const Period& p, const Period& q) { return omega(p, h_tau(tau) * q); }

inline double norm_tau(Complex tau, const Period& p) { return std::sqrt(inner_tau(tau, p, p)); }

}  // namespace circlepat
