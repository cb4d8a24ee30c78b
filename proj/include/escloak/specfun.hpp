#pragma once

// Spherical Bessel/Hankel functions, derivatives, Riccati-type combinations,
// and double factorials. Real positive arguments only.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace escloak {

using cplx = std::complex<double>;

inline double double_factorial(int k) {
  if (k < -1) throw std::domain_error("double_factorial: k must be >= -1");
  double acc = 1.0;
  for (int i = k; i > 1; i -= 2) acc *= i;
  return acc;
}

enum class BesselKind { j, y, h1 };
enum class RiccatiKind { H, J };

namespace detail {

// ascending series, safe for t < max(1, n/2)
inline double sph_j_series(int n, double t) {
  double lead = 1.0;
  for (int i = 1; i <= n; ++i) lead *= t / (2 * i + 1);
  const double t2 = t * t;
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 200; ++k) {
    term *= -t2 / (2.0 * (k + 1) * (2 * n + 2 * k + 3));
    sum += term;
    if (std::abs(term) < std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return lead * sum;
}

// Miller downward recurrence; normalized against whichever of j_0, j_1 is
// larger in magnitude (either can sit near a zero, never both)
inline double sph_j_miller(int n, double t) {
  const int start = n + 20 + static_cast<int>(std::ceil(t)) +
                    static_cast<int>(std::ceil(6.0 * std::cbrt(t * t)));
  double fkp1 = 0.0, fk = std::numeric_limits<double>::min() * 1e20;
  double fn = (n == start) ? fk : 0.0, f1 = 0.0;
  for (int k = start; k > 0; --k) {
    double fkm1 = (2.0 * k + 1.0) / t * fk - fkp1;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 == n) fn = fk;
    if (k - 1 == 1) f1 = fk;
    if (std::abs(fk) > 1e250) {
      fk *= 1e-250;
      fkp1 *= 1e-250;
      fn *= 1e-250;
      f1 *= 1e-250;
    }
  }
  const double j0 = std::sin(t) / t;
  const double j1 = std::sin(t) / (t * t) - std::cos(t) / t;
  return std::abs(j0) >= std::abs(j1) ? fn * (j0 / fk) : fn * (j1 / f1);
}

}  // namespace detail

inline double sph_bessel_j(int n, double t) {
  if (n < 0) throw std::domain_error("sph_bessel_j: order must be >= 0");
  if (t < 0) throw std::domain_error("sph_bessel_j: argument must be >= 0");
  if (t == 0) return n == 0 ? 1.0 : 0.0;
  if (t < std::max(1.0, 0.5 * n)) return detail::sph_j_series(n, t);
  if (n == 0) return std::sin(t) / t;
  return detail::sph_j_miller(n, t);
}

inline double sph_bessel_y(int n, double t) {
  if (n < 0) throw std::domain_error("sph_bessel_y: order must be >= 0");
  if (t <= 0) throw std::domain_error("sph_bessel_y: argument must be > 0");
  double ym = -std::cos(t) / t;
  if (n == 0) return ym;
  double yk = ym / t - std::sin(t) / t;
  for (int k = 1; k < n; ++k) {
    double ykp1 = (2.0 * k + 1.0) / t * yk - ym;
    ym = yk;
    yk = ykp1;
  }
  return yk;
}

inline cplx sph_hankel1(int n, double t) {
  if (t <= 0) throw std::domain_error("sph_hankel1: argument must be > 0");
  return {sph_bessel_j(n, t), sph_bessel_y(n, t)};
}

// f_n'(t) = -f_{n+1}(t) + (n/t) f_n(t), valid for j, y, h1
inline double sph_bessel_j_derivative(int n, double t) {
  if (t == 0) return n == 1 ? 1.0 / 3.0 : 0.0;
  return -sph_bessel_j(n + 1, t) + (n / t) * sph_bessel_j(n, t);
}

inline double sph_bessel_y_derivative(int n, double t) {
  return -sph_bessel_y(n + 1, t) + (n / t) * sph_bessel_y(n, t);
}

inline cplx sph_hankel1_derivative(int n, double t) {
  return {sph_bessel_j_derivative(n, t), sph_bessel_y_derivative(n, t)};
}

inline cplx sph_bessel_derivative(BesselKind kind, int n, double t) {
  switch (kind) {
    case BesselKind::j: return sph_bessel_j_derivative(n, t);
    case BesselKind::y: return sph_bessel_y_derivative(n, t);
    case BesselKind::h1: return sph_hankel1_derivative(n, t);
  }
  throw std::logic_error("sph_bessel_derivative: bad kind");
}

// riccati(J,n,t) = j_n(t) + t j_n'(t); riccati(H,n,t) likewise with h_n^{(1)}
inline cplx riccati(RiccatiKind kind, int n, double t) {
  if (kind == RiccatiKind::J) return sph_bessel_j(n, t) + t * sph_bessel_j_derivative(n, t);
  return sph_hankel1(n, t) + t * sph_hankel1_derivative(n, t);
}

}  // namespace escloak
