#pragma once

// Scalar and vector spherical harmonics, vector Debye potentials, and a
// product quadrature rule on the unit sphere. Vector fields are expressed in
// the local (e_r, e_theta, e_phi) frame of the evaluation direction.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "escloak/specfun.hpp"

namespace escloak {

struct SphericalDirection {
  double theta = 0.0;
  double phi = 0.0;
};

enum class VecKind { A, B, C };
enum class ModeKind { L, M, N };
enum class Family { radiating, entire };

struct ModeIndex {
  ModeKind kind;
  int n;
  int m;
};

using FrameVector3 = Eigen::Vector3cd;

namespace detail {

// Column of orthonormalized associated Legendre values divided by sin(theta)^strip
// (strip = 0 or 1); strip = 1 stays regular at the poles for m >= 1.
// Values carry no Condon-Shortley factor.
inline void legendre_column(int n, int m, double x, double s, int strip,
                            double* out_n, double* out_nm1) {
  const double s_seed = strip ? 1.0 : s;
  double pmm = 1.0 / std::sqrt(4.0 * M_PI);
  if (m > 0) {
    pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s_seed;
    for (int i = 1; i < m; ++i) pmm *= std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
  }
  if (n == m) {
    *out_n = pmm;
    *out_nm1 = 0.0;
    return;
  }
  double pm1 = pmm;
  double pm2 = 0.0;
  for (int k = m + 1; k <= n; ++k) {
    const double km1 = k - 1.0;
    const double a = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - m * m));
    const double b = std::sqrt((km1 * km1 - m * m) / (4.0 * km1 * km1 - 1.0));
    const double pk = a * (x * pm1 - b * pm2);
    pm2 = pm1;
    pm1 = pk;
  }
  *out_n = pm1;
  *out_nm1 = pm2;
}

struct AngularParts {
  double p;    // normalized P (no CS phase)
  double tau;  // d/dtheta of p
  double pi;   // m * p / sin(theta), regular at poles
};

// m >= 0 only; callers map negative m through conjugation symmetry
inline AngularParts angular_parts(int n, int m, double theta) {
  const double x = std::cos(theta), s = std::sin(theta);
  AngularParts out{0.0, 0.0, 0.0};
  double pn = 0.0, pnm1 = 0.0;
  legendre_column(n, m, x, s, 0, &pn, &pnm1);
  out.p = pn;
  if (m == 0) {
    // tau = -sqrt(n(n+1)) * p_n^1, evaluated through the sine-stripped column
    // so the pole limit comes out exact instead of as 0/0
    if (n >= 1) {
      double q1n = 0.0, q1nm1 = 0.0;
      legendre_column(n, 1, x, s, 1, &q1n, &q1nm1);
      out.tau = -std::sqrt(static_cast<double>(n) * (n + 1)) * s * q1n;
    }
    out.pi = 0.0;
    return out;
  }
  double qn = 0.0, qnm1 = 0.0;  // p/s column, regular for m >= 1
  legendre_column(n, m, x, s, 1, &qn, &qnm1);
  const double c =
      std::sqrt((static_cast<double>(n) * n - m * m) * (2.0 * n + 1.0) / (2.0 * n - 1.0));
  out.tau = n * x * qn - c * qnm1;
  out.pi = m * qn;
  return out;
}

}  // namespace detail

inline std::complex<double> sph_harm(int n, int m, const SphericalDirection& dir) {
  if (n < 0 || std::abs(m) > n) throw std::invalid_argument("sph_harm: need |m| <= n");
  const int ma = std::abs(m);
  const auto parts = detail::angular_parts(n, ma, dir.theta);
  const double sign = (ma % 2 == 0) ? 1.0 : -1.0;  // explicit (-1)^m of the definition
  std::complex<double> y = sign * parts.p * std::exp(cplx(0.0, ma * dir.phi));
  if (m < 0) y = sign * std::conj(y);
  return y;
}

inline FrameVector3 vec_harm(VecKind kind, int n, int m, const SphericalDirection& dir) {
  if (n < 0 || std::abs(m) > n) throw std::invalid_argument("vec_harm: need |m| <= n");
  if (kind != VecKind::A && n < 1)
    throw std::invalid_argument("vec_harm: kinds B and C require n >= 1");
  if (kind == VecKind::A) return {sph_harm(n, m, dir), 0.0, 0.0};

  const int ma = std::abs(m);
  const auto parts = detail::angular_parts(n, ma, dir.theta);
  const double sign = (ma % 2 == 0) ? 1.0 : -1.0;
  const cplx phase = sign * std::exp(cplx(0.0, ma * dir.phi));
  const double rn = std::sqrt(static_cast<double>(n) * (n + 1));
  cplx bth = parts.tau * phase / rn;
  cplx bph = cplx(0.0, 1.0) * parts.pi * phase / rn;
  if (m < 0) {
    bth = sign * std::conj(bth);
    bph = sign * std::conj(bph);
  }
  if (kind == VecKind::B) return {0.0, bth, bph};
  return {0.0, bph, -bth};  // C = B x e_r
}

inline FrameVector3 debye_potential(const ModeIndex& mode, Family family, double r,
                                    const SphericalDirection& dir, double kappaP,
                                    double kappaS) {
  if (r <= 0) {
    if (family == Family::radiating)
      throw std::domain_error("debye_potential: radiating family singular at r = 0");
    throw std::domain_error("debye_potential: r must be positive");
  }
  const int n = mode.n;
  if (mode.kind != ModeKind::L && n < 1)
    throw std::invalid_argument("debye_potential: M and N modes require n >= 1");
  const bool ent = family == Family::entire;
  const auto f = [&](double t) { return ent ? cplx(sph_bessel_j(n, t)) : sph_hankel1(n, t); };
  const auto fp = [&](double t) {
    return ent ? cplx(sph_bessel_j_derivative(n, t)) : sph_hankel1_derivative(n, t);
  };
  const double nn = static_cast<double>(n) * (n + 1), rn = std::sqrt(nn);

  if (mode.kind == ModeKind::L) {
    const double tP = kappaP * r;
    const cplx uA = fp(tP);
    if (n == 0) return uA * vec_harm(VecKind::A, 0, 0, dir);
    const cplx uB = rn * f(tP) / tP;
    return uA * vec_harm(VecKind::A, n, mode.m, dir) + uB * vec_harm(VecKind::B, n, mode.m, dir);
  }
  const double tS = kappaS * r;
  if (mode.kind == ModeKind::M) {
    return rn * f(tS) * vec_harm(VecKind::C, n, mode.m, dir);
  }
  const cplx uA = nn * f(tS) / tS;
  const cplx uB = (rn / tS) * (f(tS) + tS * fp(tS));
  return uA * vec_harm(VecKind::A, n, mode.m, dir) + uB * vec_harm(VecKind::B, n, mode.m, dir);
}

struct QuadratureNode {
  SphericalDirection dir;
  double weight;
};

// Gauss-Legendre in cos(theta) x uniform trapezoid in phi; with `order` polar
// nodes and 2*order azimuthal nodes the rule is exact for spherical-harmonic
// products up to combined degree 2*order - 1.
inline std::vector<QuadratureNode> sphere_quadrature(int order) {
  if (order < 1) throw std::invalid_argument("sphere_quadrature: order must be >= 1");
  std::vector<double> gx(order), gw(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        double q0 = 1.0, q1 = x;
        for (int k = 2; k <= order; ++k) {
          const double q2 = ((2.0 * k - 1.0) * x * q1 - (k - 1.0) * q0) / k;
          q0 = q1;
          q1 = q2;
        }
        const double d = order * (x * q1 - q0) / (x * x - 1.0);
        gx[i] = x;
        gw[i] = 2.0 / ((1.0 - x * x) * d * d);
        break;
      }
    }
  }
  const int nphi = 2 * order;
  const double wphi = 2.0 * M_PI / nphi;
  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<size_t>(order) * nphi);
  for (int i = 0; i < order; ++i) {
    const double theta = std::acos(gx[i]);
    for (int k = 0; k < nphi; ++k)
      nodes.push_back({{theta, wphi * k}, gw[i] * wphi});
  }
  return nodes;
}

// Cartesian helpers (used by finite-difference oracles and far-field output)

inline Eigen::Vector3d unit_r(const SphericalDirection& d) {
  return {std::sin(d.theta) * std::cos(d.phi), std::sin(d.theta) * std::sin(d.phi),
          std::cos(d.theta)};
}

inline Eigen::Vector3d unit_theta(const SphericalDirection& d) {
  return {std::cos(d.theta) * std::cos(d.phi), std::cos(d.theta) * std::sin(d.phi),
          -std::sin(d.theta)};
}

inline Eigen::Vector3d unit_phi(const SphericalDirection& d) {
  return {-std::sin(d.phi), std::cos(d.phi), 0.0};
}

inline Eigen::Vector3cd frame_to_cartesian(const FrameVector3& v, const SphericalDirection& d) {
  return v(0) * unit_r(d).cast<cplx>() + v(1) * unit_theta(d).cast<cplx>() +
         v(2) * unit_phi(d).cast<cplx>();
}

inline SphericalDirection direction_of(const Eigen::Vector3d& x) {
  const double r = x.norm();
  if (r == 0) throw std::domain_error("direction_of: zero vector");
  return {std::acos(std::clamp(x(2) / r, -1.0, 1.0)), std::atan2(x(1), x(0))};
}

}  // namespace escloak
