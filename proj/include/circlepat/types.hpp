#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace circlepat {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Deck translation of the universal cover, in units of the two generators.
struct Shift {
  int m = 0;
  int n = 0;

  constexpr Shift operator+(Shift o) const { return {m + o.m, n + o.n}; }
  constexpr Shift operator-(Shift o) const { return {m - o.m, n - o.n}; }
  constexpr Shift operator-() const { return {-m, -n}; }
  constexpr Shift& operator+=(Shift o) {
    m += o.m;
    n += o.n;
    return *this;
  }
  constexpr bool operator==(const Shift&) const = default;
  constexpr bool is_zero() const { return m == 0 && n == 0; }

  /// Pairing with a period vector (P1, P2): m*P1 + n*P2.
  template <class T>
  constexpr T pair(const T& p1, const T& p2) const {
    return static_cast<double>(m) * p1 + static_cast<double>(n) * p2;
  }
};

/// A vector in the two-dimensional period space.
using Period = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

/// Complex affine map z -> a z + b.
struct Affine {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  Complex operator()(Complex z) const { return a * z + b; }

  /// (*this) o other
  Affine compose(const Affine& other) const { return {a * other.a, a * other.b + b}; }

  Affine inverse() const {
    Complex ia = 1.0 / a;
    return {ia, -ia * b};
  }

  Affine pow(int k) const {
    Affine base = k >= 0 ? *this : inverse();
    Affine out;
    for (int i = 0; i < std::abs(k); ++i) out = base.compose(out);
    return out;
  }

  /// Affine map sending p0 -> q0 and p1 -> q1.
  static Affine from_points(Complex p0, Complex p1, Complex q0, Complex q1) {
    Complex a = (q1 - q0) / (p1 - p0);
    return {a, q0 - a * p0};
  }
};

}  // namespace circlepat
