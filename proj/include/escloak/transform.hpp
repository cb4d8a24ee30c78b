#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace escloak {

enum class MapKind { identity, F_eps, psi_inv_eps };
enum class Side { below, above };

// Radial maps r -> g(r) x_hat.  F_eps blows the ball of radius eps up to the
// unit ball while fixing everything beyond radius 2; psi_inv_eps is x -> x/eps.
// `inverted` applies g^{-1} instead, which stays radial and piecewise linear.
struct RadialMap {
  MapKind kind = MapKind::identity;
  double eps = 0.5;
  bool inverted = false;
};

inline RadialMap identity_map() { return RadialMap{}; }
inline RadialMap blow_up_map(double eps) { return RadialMap{MapKind::F_eps, eps, false}; }
inline RadialMap scaling_map(double eps) { return RadialMap{MapKind::psi_inv_eps, eps, false}; }
inline RadialMap inverse_of(RadialMap map) {
  map.inverted = !map.inverted;
  return map;
}

namespace detail {

struct RadialBranch {
  double value = 0.0;  // g(r)
  double slope = 1.0;  // g'(r)
};

inline void check_map(const RadialMap& map) {
  if (map.kind != MapKind::identity && !(map.eps > 0.0 && map.eps < 1.0))
    throw std::invalid_argument("radial map: eps must lie in (0, 1)");
}

// Forward branches of F_eps, outermost first; boundaries r = 2, 2 eps, eps.
inline RadialBranch f_eps_forward(double eps, double r, Side side) {
  const auto at_or_above = [&](double b) { return r > b || (r == b && side == Side::above); };
  if (at_or_above(2.0)) return {r, 1.0};
  if (at_or_above(2.0 * eps)) {
    const double slope = 1.0 / (4.0 * (1.0 - eps));
    return {(3.0 - 4.0 * eps) / (2.0 * (1.0 - eps)) + r * slope, slope};
  }
  if (at_or_above(eps)) return {0.5 + r / (2.0 * eps), 0.5 / eps};
  return {r / eps, 1.0 / eps};
}

// Inverse branches, partitioned by image radius at 2, 3/2, 1.
inline RadialBranch f_eps_inverse(double eps, double r, Side side) {
  const auto at_or_above = [&](double b) { return r > b || (r == b && side == Side::above); };
  if (at_or_above(2.0)) return {r, 1.0};
  if (at_or_above(1.5)) {
    const double slope = 4.0 * (1.0 - eps);
    return {(r - (3.0 - 4.0 * eps) / (2.0 * (1.0 - eps))) * slope, slope};
  }
  if (at_or_above(1.0)) return {(r - 0.5) * 2.0 * eps, 2.0 * eps};
  return {r * eps, eps};
}

inline RadialBranch radial_branch(const RadialMap& map, double r, Side side) {
  check_map(map);
  switch (map.kind) {
    case MapKind::identity:
      return {r, 1.0};
    case MapKind::psi_inv_eps:
      return map.inverted ? RadialBranch{r * map.eps, map.eps}
                          : RadialBranch{r / map.eps, 1.0 / map.eps};
    case MapKind::F_eps:
      return map.inverted ? f_eps_inverse(map.eps, r, side) : f_eps_forward(map.eps, r, side);
  }
  throw std::logic_error("radial map: unknown kind");
}

}  // namespace detail

inline Eigen::Vector3d apply_map(const RadialMap& map, const Eigen::Vector3d& x,
                                 Side side = Side::above) {
  const double r = x.norm();
  if (r == 0.0) return Eigen::Vector3d::Zero();
  return detail::radial_branch(map, r, side).value / r * x;
}

inline Eigen::Vector3d apply_inverse(const RadialMap& map, const Eigen::Vector3d& y,
                                     Side side = Side::above) {
  return apply_map(inverse_of(map), y, side);
}

// M = g'(r) xh xh^T + (g(r)/r) (I - xh xh^T); at the origin every map here is
// linear, so M = g'(0) I.
inline Eigen::Matrix3d jacobian(const RadialMap& map, const Eigen::Vector3d& x,
                                Side side = Side::above) {
  const double r = x.norm();
  if (r == 0.0)
    return detail::radial_branch(map, 0.0, side).slope * Eigen::Matrix3d::Identity();
  const detail::RadialBranch b = detail::radial_branch(map, r, side);
  const Eigen::Vector3d xh = x / r;
  const Eigen::Matrix3d pr = xh * xh.transpose();
  return b.slope * pr + (b.value / r) * (Eigen::Matrix3d::Identity() - pr);
}

inline double map_determinant(const RadialMap& map, const Eigen::Vector3d& x,
                              Side side = Side::above) {
  const double r = x.norm();
  const detail::RadialBranch b = detail::radial_branch(map, r, side);
  const double transverse = r == 0.0 ? b.slope : b.value / r;
  return b.slope * transverse * transverse;
}

// Maps applied left to right; the Jacobian is the chain-rule product.
struct ComposedMap {
  std::vector<RadialMap> stages;
};

inline Eigen::Vector3d apply_map(const ComposedMap& map, Eigen::Vector3d x,
                                 Side side = Side::above) {
  for (const RadialMap& stage : map.stages) x = apply_map(stage, x, side);
  return x;
}

inline Eigen::Matrix3d jacobian(const ComposedMap& map, Eigen::Vector3d x,
                                Side side = Side::above) {
  Eigen::Matrix3d j = Eigen::Matrix3d::Identity();
  for (const RadialMap& stage : map.stages) {
    j = jacobian(stage, x, side) * j;
    x = apply_map(stage, x, side);
  }
  return j;
}

struct ElasticityTensor {
  std::array<double, 81> c{};
  bool major = false, minor_left = false, minor_right = false;

  static size_t idx(int i, int j, int k, int l) {
    return static_cast<size_t>(((i * 3 + j) * 3 + k) * 3 + l);
  }
  double& at(int i, int j, int k, int l) { return c[idx(i, j, k, l)]; }
  double at(int i, int j, int k, int l) const { return c[idx(i, j, k, l)]; }

  double max_asymmetry_major() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            worst = std::max(worst, std::abs(at(i, j, k, l) - at(k, l, i, j)));
    return worst;
  }
  double max_asymmetry_minor_left() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            worst = std::max(worst, std::abs(at(i, j, k, l) - at(j, i, k, l)));
    return worst;
  }
  double max_asymmetry_minor_right() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            worst = std::max(worst, std::abs(at(i, j, k, l) - at(i, j, l, k)));
    return worst;
  }
  void recompute_flags(double tol = 1e-12) {
    major = max_asymmetry_major() <= tol;
    minor_left = max_asymmetry_minor_left() <= tol;
    minor_right = max_asymmetry_minor_right() <= tol;
  }

  static ElasticityTensor isotropic(double lambda, double mu) {
    ElasticityTensor t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            t.at(i, j, k, l) = lambda * (i == j) * (k == l) +
                               mu * ((i == k) * (j == l) + (i == l) * (j == k));
    t.recompute_flags();
    return t;
  }
};

struct TransformedPoint {
  Eigen::Vector3d image = Eigen::Vector3d::Zero();
  ElasticityTensor tensor;
  double rho = 0.0;
};

// C~_ijkl = (1/det M) sum_pq C_ipkq M_jp M_lq and rho~ = rho / det M, fields
// attached to the image point map(x).  The (i,j) minor symmetry is generally
// lost; flags are recomputed from the numbers.
inline TransformedPoint pushforward(const ElasticityTensor& C, double rho, const RadialMap& map,
                                    const Eigen::Vector3d& x, Side side = Side::above) {
  if (!(rho > 0.0)) throw std::invalid_argument("pushforward: rho must be positive");
  const Eigen::Matrix3d M = jacobian(map, x, side);
  const double det = M.determinant();
  if (!(det > 0.0)) throw std::runtime_error("pushforward: orientation-reversing Jacobian");

  TransformedPoint out;
  out.image = apply_map(map, x, side);
  out.rho = rho / det;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double sum = 0.0;
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) sum += C.at(i, p, k, q) * M(j, p) * M(l, q);
          out.tensor.at(i, j, k, l) = sum / det;
        }
  out.tensor.recompute_flags();
  return out;
}

}  // namespace escloak
