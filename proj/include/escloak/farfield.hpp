#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "escloak/harmonics.hpp"
#include "escloak/medium.hpp"
#include "escloak/scattering.hpp"

namespace escloak {

enum class WaveType { pressure, shear };

struct IncidentWave {
  WaveType kind = WaveType::pressure;
  Eigen::Vector3d d{0.0, 0.0, 1.0};
  Eigen::Vector3d q{1.0, 0.0, 0.0};  // shear polarization, orthogonal to d
};

namespace detail {

inline size_t nm_index(int n, int m) {
  return static_cast<size_t>(n) * n + static_cast<size_t>(n + m);
}

inline cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline cplx dot_conj(const FrameVector3& field, const SphericalDirection& dir,
                     const Eigen::Vector3d& v) {
  const Eigen::Vector3cd cart = frame_to_cartesian(field, dir);
  return cart.dot(v.cast<cplx>());  // Eigen dot conjugates its left factor
}

}  // namespace detail

struct IncidentCoeffs {
  int K = 0;
  std::vector<cplx> a, b, c;  // flat (k,l) storage, index k^2 + k + l

  cplx a_at(int k, int l) const { return a[detail::nm_index(k, l)]; }
  cplx b_at(int k, int l) const { return b[detail::nm_index(k, l)]; }
  cplx c_at(int k, int l) const { return c[detail::nm_index(k, l)]; }
};

struct GammaCoeffs {
  int T = 0;
  std::vector<cplx> L, M, N;  // gamma^j_nm, same flat storage

  cplx L_at(int n, int m) const { return L[detail::nm_index(n, m)]; }
  cplx M_at(int n, int m) const { return M[detail::nm_index(n, m)]; }
  cplx N_at(int n, int m) const { return N[detail::nm_index(n, m)]; }
};

struct FarFieldSample {
  SphericalDirection direction;
  FrameVector3 uP = FrameVector3::Zero();  // (e_r, e_theta, e_phi) components
  FrameVector3 uS = FrameVector3::Zero();
};

inline IncidentCoeffs plane_wave_coeffs(const IncidentWave& wave, int K, double kappaP,
                                        double kappaS) {
  if (K < 1) throw std::invalid_argument("plane_wave_coeffs: K >= 1");
  if (!(kappaP > 0.0) || !(kappaS > 0.0))
    throw std::invalid_argument("plane_wave_coeffs: wave numbers must be positive");
  if (std::abs(wave.d.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("plane_wave_coeffs: d must be a unit vector");
  const size_t count = static_cast<size_t>(K + 1) * (K + 1);
  IncidentCoeffs out;
  out.K = K;
  out.a.assign(count, cplx{});
  out.b.assign(count, cplx{});
  out.c.assign(count, cplx{});
  const SphericalDirection dir = direction_of(wave.d);
  const double fourpi = 4.0 * M_PI;

  if (wave.kind == WaveType::pressure) {
    // conj(A_kl(d)) . d = conj(Y_kl(d))
    for (int k = 0; k <= K; ++k)
      for (int l = -k; l <= k; ++l)
        out.a[detail::nm_index(k, l)] =
            -fourpi * detail::ipow(k + 1) * std::conj(sph_harm(k, l, dir));
    return out;
  }

  if (std::abs(wave.q.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("plane_wave_coeffs: q must be a unit vector");
  if (std::abs(wave.q.dot(wave.d)) > 1e-12)
    throw std::invalid_argument("plane_wave_coeffs: shear polarization q must satisfy q . d = 0");
  const Eigen::Vector3d p = (wave.d.cross(wave.q)).cross(wave.d);  // equals q here
  for (int k = 1; k <= K; ++k) {
    for (int l = -k; l <= k; ++l) {
      const cplx cdot = detail::dot_conj(vec_harm(VecKind::C, k, l, dir), dir, p);
      const cplx bdot = detail::dot_conj(vec_harm(VecKind::B, k, l, dir), dir, p);
      out.b[detail::nm_index(k, l)] = fourpi * detail::ipow(k) * cdot;
      out.c[detail::nm_index(k, l)] = -fourpi * detail::ipow(k + 1) * bdot;
    }
  }
  return out;
}

// Diagonal collapse for concentric spheres: gamma^j_nm picks up only the
// (k,l) = (n,m) incident term.  The table stores core-normalized entries, so
// the physical coefficients carry one factor of the core radius.
inline GammaCoeffs gamma_coeffs(const EscTable& table, const IncidentCoeffs& inc) {
  if (table.order() < inc.K)
    throw std::invalid_argument(
        "gamma_coeffs: ESC table order is smaller than the incident truncation");
  GammaCoeffs g;
  g.T = inc.K;
  const size_t count = static_cast<size_t>(inc.K + 1) * (inc.K + 1);
  g.L.assign(count, cplx{});
  g.M.assign(count, cplx{});
  g.N.assign(count, cplx{});
  const double rc = table.core_radius;
  for (int n = 0; n <= inc.K; ++n) {
    const EscRow& row = table.rows[static_cast<size_t>(n)];
    for (int m = -n; m <= n; ++m) {
      const size_t i = detail::nm_index(n, m);
      if (n == 0) {
        g.L[i] = inc.a[i] * row.W_LL * rc;
        continue;
      }
      const double rt = std::sqrt(static_cast<double>(n) * (n + 1));
      g.L[i] = (inc.a[i] * row.W_LL + inc.c[i] * row.W_LN / rt) * rc;
      g.N[i] = (inc.a[i] * row.W_NL + inc.c[i] * row.W_NN / rt) * rc;
      g.M[i] = (inc.b[i] * row.W_MM / rt) * rc;
    }
  }
  return g;
}

inline FarFieldSample far_field_amplitude(const GammaCoeffs& g, const SphericalDirection& dir,
                                          const Material& background, double omega) {
  const WaveNumbers w = wave_numbers(background, omega);
  const cplx i{0.0, 1.0};
  FarFieldSample out;
  out.direction = dir;
  for (int n = 0; n <= g.T; ++n) {
    const cplx phase_n = detail::ipow(-n);        // e^{-i n pi / 2}
    const cplx phase_n1 = detail::ipow(-(n + 1));  // e^{-i (n+1) pi / 2}
    const cplx cP = i * w.kappaP / (w.cP * w.cP) * phase_n;
    for (int m = -n; m <= n; ++m) {
      const size_t k = detail::nm_index(n, m);
      if (g.L[k] != cplx{}) out.uP += cP * g.L[k] * vec_harm(VecKind::A, n, m, dir);
      if (n == 0) continue;
      const double rt = std::sqrt(static_cast<double>(n) * (n + 1));
      const cplx cS = i * w.kappaS / (rt * w.cS * w.cS);
      if (g.M[k] != cplx{})
        out.uS += cS * phase_n1 * g.M[k] * vec_harm(VecKind::C, n, m, dir);
      if (g.N[k] != cplx{})
        out.uS += cS * phase_n * g.N[k] * vec_harm(VecKind::B, n, m, dir);
    }
  }
  return out;
}

inline FarFieldSample far_field_amplitude(const GammaCoeffs& g, const Eigen::Vector3d& direction,
                                          const Material& background, double omega) {
  return far_field_amplitude(g, direction_of(direction), background, omega);
}

inline Eigen::Vector3cd far_field_cartesian_P(const FarFieldSample& s) {
  return frame_to_cartesian(s.uP, s.direction);
}

inline Eigen::Vector3cd far_field_cartesian_S(const FarFieldSample& s) {
  return frame_to_cartesian(s.uS, s.direction);
}

// Parseval sums of |uP|^2 and |uS|^2 over the unit sphere.
inline double total_scattering_strength(const GammaCoeffs& g, const Material& background,
                                        double omega) {
  const WaveNumbers w = wave_numbers(background, omega);
  const double cfP = w.kappaP / (w.cP * w.cP);
  const double cfS = w.kappaS / (w.cS * w.cS);
  double sumP = 0.0, sumS = 0.0;
  for (int n = 0; n <= g.T; ++n) {
    const double nn = static_cast<double>(n) * (n + 1);
    for (int m = -n; m <= n; ++m) {
      const size_t k = detail::nm_index(n, m);
      sumP += std::norm(g.L[k]);
      if (n >= 1) sumS += (std::norm(g.M[k]) + std::norm(g.N[k])) / nn;
    }
  }
  return cfP * cfP * sumP + cfS * cfS * sumS;
}

}  // namespace escloak
