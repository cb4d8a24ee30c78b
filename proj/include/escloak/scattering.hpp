#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "escloak/harmonics.hpp"
#include "escloak/medium.hpp"
#include "escloak/specfun.hpp"

namespace escloak {

struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateFrequencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Transfer-matrix blocks.  ln_block rows are (radial displacement, tangential
// displacement, radial traction, tangential traction); columns are the entire
// L, entire N, radiating L, radiating N coefficients.  m_block is the 2x2
// analogue for the decoupled M mode.
struct BlockMatrices {
  Eigen::Matrix4cd ln_block = Eigen::Matrix4cd::Zero();
  Eigen::Matrix2cd m_block = Eigen::Matrix2cd::Zero();
};

namespace detail {

inline cplx radial_f(bool radiating, int n, double t) {
  return radiating ? sph_hankel1(n, t) : cplx(sph_bessel_j(n, t), 0.0);
}

inline cplx radial_fp(bool radiating, int n, double t) {
  return radiating ? sph_hankel1_derivative(n, t) : cplx(sph_bessel_j_derivative(n, t), 0.0);
}

// d/dt [ f(t)/t ]
inline cplx radial_gp(bool radiating, int n, double t) {
  return (radial_fp(radiating, n, t) * t - radial_f(radiating, n, t)) / (t * t);
}

struct LnColumn {
  cplx uA, uB, TA, TB;
};

inline LnColumn l_column(bool radiating, int n, double kP, double kS, double mu, double r) {
  const double nn = static_cast<double>(n) * (n + 1), rt = std::sqrt(nn);
  const double tP = kP * r, tS = kS * r;
  const cplx f = radial_f(radiating, n, tP), fp = radial_fp(radiating, n, tP);
  LnColumn c;
  c.uA = fp;
  c.uB = rt * f / tP;
  c.TA = 2.0 * mu * kP * ((nn - tS * tS / 2.0) * f / (tP * tP) - 2.0 * fp / tP);
  c.TB = 2.0 * mu * kP * rt * radial_gp(radiating, n, tP);
  return c;
}

inline LnColumn n_column(bool radiating, int n, double kS, double mu, double r) {
  const double nn = static_cast<double>(n) * (n + 1), rt = std::sqrt(nn);
  const double tS = kS * r;
  const cplx f = radial_f(radiating, n, tS), fp = radial_fp(radiating, n, tS);
  LnColumn c;
  c.uA = nn * f / tS;
  c.uB = (rt / tS) * (f + tS * fp);
  c.TA = 2.0 * mu * kS * nn * radial_gp(radiating, n, tS);
  c.TB = 2.0 * mu * kS * rt * ((nn - 1.0 - tS * tS / 2.0) * f / (tS * tS) - fp / tS);
  return c;
}

struct MColumn {
  cplx u, T;
};

// The uniform sqrt(n(n+1)) of the M-mode field is dropped here: it scales the
// whole 2x2 block and cancels in every transfer product and ratio.
inline MColumn m_column(bool radiating, int n, double kS, double mu, double r) {
  const double tS = kS * r;
  const cplx f = radial_f(radiating, n, tS), fp = radial_fp(radiating, n, tS);
  return {f, mu * kS * (fp - f / tS)};
}

// n = 0 keeps only the L radial rows (displacement, traction)
inline Eigen::Vector2cd l0_column(bool radiating, double kP, double kS, double mu, double r) {
  const double tP = kP * r, tS = kS * r;
  const cplx f = radial_f(radiating, 0, tP), fp = radial_fp(radiating, 0, tP);
  Eigen::Vector2cd c;
  c(0) = fp;
  c(1) = 2.0 * mu * kP * ((-tS * tS / 2.0) * f / (tP * tP) - 2.0 * fp / tP);
  return c;
}

// Condition number after row and column max-magnitude equilibration, so the
// guard reacts to genuine degeneracy and not to the tau^{n-1} vs tau^{-n-2}
// scaling spread of the entire/radiating columns.
inline double equilibrated_cond(Eigen::MatrixXcd A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) A.row(i) /= s;
  }
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double s = A.col(j).cwiseAbs().maxCoeff();
    if (s > 0.0) A.col(j) /= s;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

constexpr double kCondLimit = 1e12;

[[noreturn]] inline void throw_ill_conditioned(const char* what, int ell, int n, double omega) {
  std::ostringstream os;
  os << what << ": transfer matrix ill-conditioned (cond > 1e12) at";
  if (ell >= 0) os << " layer " << ell << ",";
  os << " n = " << n << ", omega = " << omega;
  throw IllConditionedError(os.str());
}

}  // namespace detail

inline BlockMatrices p_matrix(const Material& mat, double omega, double r, int n, int ell = -1) {
  if (n < 1)
    throw std::invalid_argument("p_matrix: full blocks need n >= 1 (n = 0 runs through solve_modes)");
  if (!(r > 0.0)) throw std::invalid_argument("p_matrix: r must be positive");
  const WaveNumbers w = wave_numbers(mat, omega);
  BlockMatrices out;
  for (int fam = 0; fam < 2; ++fam) {
    const bool radiating = fam == 1;
    const detail::LnColumn lc = detail::l_column(radiating, n, w.kappaP, w.kappaS, mat.mu, r);
    const detail::LnColumn nc = detail::n_column(radiating, n, w.kappaS, mat.mu, r);
    const int c = 2 * fam;
    out.ln_block(0, c) = lc.uA;
    out.ln_block(1, c) = lc.uB;
    out.ln_block(2, c) = lc.TA;
    out.ln_block(3, c) = lc.TB;
    out.ln_block(0, c + 1) = nc.uA;
    out.ln_block(1, c + 1) = nc.uB;
    out.ln_block(2, c + 1) = nc.TA;
    out.ln_block(3, c + 1) = nc.TB;
    const detail::MColumn mc = detail::m_column(radiating, n, w.kappaS, mat.mu, r);
    out.m_block(0, fam) = mc.u;
    out.m_block(1, fam) = mc.T;
  }
  if (detail::equilibrated_cond(out.ln_block) > detail::kCondLimit ||
      detail::equilibrated_cond(out.m_block) > detail::kCondLimit)
    detail::throw_ill_conditioned("p_matrix", ell, n, omega);
  return out;
}

// Core boundary matrix: the traction rows of p_matrix at the core radius,
// scaled to the dimensionless form (1/(2 mu) for the L,N rows, 1/mu for M).
// Rows 3-4 of ln_block and row 2 of m_block are identically zero.
inline BlockMatrices q_matrix(const Material& innermost, double omega, int n,
                              double core_radius = 1.0) {
  const BlockMatrices p = p_matrix(innermost, omega, core_radius, n);
  BlockMatrices out;
  out.ln_block.topRows<2>() = p.ln_block.bottomRows<2>() / (2.0 * innermost.mu);
  out.m_block.row(0) = p.m_block.row(1) / innermost.mu;
  return out;
}

namespace detail {

inline Eigen::Matrix2cd p_matrix_n0(const Material& mat, double omega, double r) {
  const WaveNumbers w = wave_numbers(mat, omega);
  Eigen::Matrix2cd out;
  out.col(0) = l0_column(false, w.kappaP, w.kappaS, mat.mu, r);
  out.col(1) = l0_column(true, w.kappaP, w.kappaS, mat.mu, r);
  return out;
}

// One interface factor P_ell(r)^{-1} P_{ell-1}(r), solved after row
// equilibration of P_ell (the scaling cancels exactly since both sides of the
// solve are scaled together).
template <typename MatT>
MatT interface_factor(const MatT& p_inner, const MatT& p_outer, const char* what, int ell, int n,
                      double omega) {
  MatT a = p_inner, b = p_outer;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double s = a.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      a.row(i) /= s;
      b.row(i) /= s;
    }
  }
  if (equilibrated_cond(a) > kCondLimit) throw_ill_conditioned(what, ell, n, omega);
  return a.partialPivLu().solve(b);
}

inline Eigen::RowVector2cd r_row_n0(const LayerStack& stack, double omega) {
  const int L = stack.L();
  Eigen::RowVector2cd row =
      p_matrix_n0(stack.material(L), omega, stack.core_radius()).row(1);
  for (int ell = L; ell >= 1; --ell) {
    const double r = stack.radii[static_cast<size_t>(ell) - 1];
    const Eigen::Matrix2cd pl = p_matrix_n0(stack.material(ell), omega, r);
    const Eigen::Matrix2cd pm = p_matrix_n0(stack.material(ell - 1), omega, r);
    row = row * interface_factor(pl, pm, "r_matrices", ell, 0, omega);
  }
  return row;
}

}  // namespace detail

// R^{L,N} (rows 1-2 of ln_block) and R^M (row 1 of m_block): the core boundary
// matrix pushed outward through every interface.
inline BlockMatrices r_matrices(const LayerStack& stack, double omega, int n) {
  if (n < 1) throw std::invalid_argument("r_matrices: n >= 1 (n = 0 runs through solve_modes)");
  require_valid(stack);
  const int L = stack.L();
  const BlockMatrices q = q_matrix(stack.material(L), omega, n, stack.core_radius());
  Eigen::Matrix<cplx, 2, 4> rln = q.ln_block.topRows<2>();
  Eigen::Matrix<cplx, 1, 2> rm = q.m_block.row(0);
  for (int ell = L; ell >= 1; --ell) {
    const double r = stack.radii[static_cast<size_t>(ell) - 1];
    const BlockMatrices pl = p_matrix(stack.material(ell), omega, r, n, ell);
    const BlockMatrices pm = p_matrix(stack.material(ell - 1), omega, r, n, ell - 1);
    rln = rln * detail::interface_factor(pl.ln_block, pm.ln_block, "r_matrices", ell, n, omega);
    rm = rm * detail::interface_factor(pl.m_block, pm.m_block, "r_matrices", ell, n, omega);
  }
  BlockMatrices out;
  out.ln_block.topRows<2>() = rln;
  out.m_block.row(0) = rm;
  return out;
}

namespace detail {

struct BZero {
  cplx LL, NL, LN, NN, MM;
};

[[noreturn]] inline void throw_degenerate(int n, double omega) {
  std::ostringstream os;
  os << "solve_modes: scattering system degenerate at n = " << n << ", omega = " << omega
     << " (denominator below 1e-14 after row normalization)";
  throw DegenerateFrequencyError(os.str());
}

// The five radiating background coefficients for unit incidences, via the 2x2
// minors of the R rows.  Rows are max-normalized first so the denominator
// threshold is scale-free; the normalization cancels in every ratio.
inline BZero b_zero(const BlockMatrices& R, int n, double omega) {
  Eigen::Matrix<cplx, 2, 4> r = R.ln_block.topRows<2>();
  for (int i = 0; i < 2; ++i) {
    const double s = r.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) r.row(i) /= s;
  }
  const cplx den = r(0, 3) * r(1, 2) - r(0, 2) * r(1, 3);
  if (std::abs(den) < 1e-14) throw_degenerate(n, omega);
  BZero b;
  b.LL = (r(0, 0) * r(1, 3) - r(0, 3) * r(1, 0)) / den;
  b.NL = (r(0, 2) * r(1, 0) - r(0, 0) * r(1, 2)) / den;
  b.LN = (r(0, 1) * r(1, 3) - r(0, 3) * r(1, 1)) / den;
  b.NN = (r(0, 2) * r(1, 1) - r(0, 1) * r(1, 2)) / den;
  Eigen::RowVector2cd m = R.m_block.row(0);
  const double sm = m.cwiseAbs().maxCoeff();
  if (sm > 0.0) m /= sm;
  if (std::abs(m(1)) < 1e-14) throw_degenerate(n, omega);
  b.MM = -m(0) / m(1);
  return b;
}

inline cplx b_zero_n0(const LayerStack& stack, double omega) {
  Eigen::RowVector2cd row = r_row_n0(stack, omega);
  const double s = row.cwiseAbs().maxCoeff();
  if (s > 0.0) row /= s;
  if (std::abs(row(1)) < 1e-14) throw_degenerate(0, omega);
  return -row(0) / row(1);
}

}  // namespace detail

struct LayerCoeffs {
  cplx aL{}, aN{}, aM{}, bL{}, bN{}, bM{};
};

struct ModeSolution {
  ModeKind incident = ModeKind::L;
  int n = 0;
  std::vector<LayerCoeffs> layers;  // ell = 0..L
  double residual = 0.0;
};

inline double interface_residual(const LayerStack& stack, double omega, int n,
                                 const ModeSolution& sol);

inline ModeSolution solve_modes(const LayerStack& stack, double omega, int n, ModeKind incident) {
  require_valid(stack);
  if (n < 0) throw std::invalid_argument("solve_modes: n >= 0");
  if (n == 0 && incident != ModeKind::L)
    throw std::invalid_argument("solve_modes: incident M or N requires n >= 1");
  const int L = stack.L();
  ModeSolution sol;
  sol.incident = incident;
  sol.n = n;
  sol.layers.assign(static_cast<size_t>(L) + 1, LayerCoeffs{});

  if (n == 0) {
    sol.layers[0].aL = 1.0;
    sol.layers[0].bL = detail::b_zero_n0(stack, omega);
    Eigen::Vector2cd v(sol.layers[0].aL, sol.layers[0].bL);
    for (int ell = 1; ell <= L; ++ell) {
      const double r = stack.radii[static_cast<size_t>(ell) - 1];
      const Eigen::Matrix2cd pl = detail::p_matrix_n0(stack.material(ell), omega, r);
      const Eigen::Matrix2cd pm = detail::p_matrix_n0(stack.material(ell - 1), omega, r);
      v = detail::interface_factor(pl, pm, "solve_modes", ell, 0, omega) * v;
      sol.layers[static_cast<size_t>(ell)].aL = v(0);
      sol.layers[static_cast<size_t>(ell)].bL = v(1);
    }
    sol.residual = interface_residual(stack, omega, n, sol);
    return sol;
  }

  if (incident == ModeKind::M) {
    const BlockMatrices R = r_matrices(stack, omega, n);
    sol.layers[0].aM = 1.0;
    sol.layers[0].bM = detail::b_zero(R, n, omega).MM;
    Eigen::Vector2cd v(sol.layers[0].aM, sol.layers[0].bM);
    for (int ell = 1; ell <= L; ++ell) {
      const double r = stack.radii[static_cast<size_t>(ell) - 1];
      const BlockMatrices pl = p_matrix(stack.material(ell), omega, r, n, ell);
      const BlockMatrices pm = p_matrix(stack.material(ell - 1), omega, r, n, ell - 1);
      v = detail::interface_factor(pl.m_block, pm.m_block, "solve_modes", ell, n, omega) * v;
      sol.layers[static_cast<size_t>(ell)].aM = v(0);
      sol.layers[static_cast<size_t>(ell)].bM = v(1);
    }
    sol.residual = interface_residual(stack, omega, n, sol);
    return sol;
  }

  const BlockMatrices R = r_matrices(stack, omega, n);
  const detail::BZero b = detail::b_zero(R, n, omega);
  if (incident == ModeKind::L) {
    sol.layers[0].aL = 1.0;
    sol.layers[0].bL = b.LL;
    sol.layers[0].bN = b.NL;
  } else {
    sol.layers[0].aN = 1.0;
    sol.layers[0].bL = b.LN;
    sol.layers[0].bN = b.NN;
  }
  Eigen::Vector4cd v(sol.layers[0].aL, sol.layers[0].aN, sol.layers[0].bL, sol.layers[0].bN);
  for (int ell = 1; ell <= L; ++ell) {
    const double r = stack.radii[static_cast<size_t>(ell) - 1];
    const BlockMatrices pl = p_matrix(stack.material(ell), omega, r, n, ell);
    const BlockMatrices pm = p_matrix(stack.material(ell - 1), omega, r, n, ell - 1);
    v = detail::interface_factor(pl.ln_block, pm.ln_block, "solve_modes", ell, n, omega) * v;
    LayerCoeffs& c = sol.layers[static_cast<size_t>(ell)];
    c.aL = v(0);
    c.aN = v(1);
    c.bL = v(2);
    c.bN = v(3);
  }
  sol.residual = interface_residual(stack, omega, n, sol);
  return sol;
}

inline double interface_residual(const LayerStack& stack, double omega, int n,
                                 const ModeSolution& sol) {
  const int L = stack.L();
  if (sol.layers.size() != static_cast<size_t>(L) + 1)
    throw std::invalid_argument("interface_residual: solution does not match stack layer count");
  auto ln_vec = [&sol](int ell) {
    const LayerCoeffs& c = sol.layers[static_cast<size_t>(ell)];
    return Eigen::Vector4cd(c.aL, c.aN, c.bL, c.bN);
  };
  auto m_vec = [&sol](int ell) {
    const LayerCoeffs& c = sol.layers[static_cast<size_t>(ell)];
    return Eigen::Vector2cd(c.aM, c.bM);
  };
  double worst = 0.0;
  if (n == 0) {
    for (int ell = 1; ell <= L; ++ell) {
      const double r = stack.radii[static_cast<size_t>(ell) - 1];
      const Eigen::Matrix2cd pm = detail::p_matrix_n0(stack.material(ell - 1), omega, r);
      const Eigen::Matrix2cd pl = detail::p_matrix_n0(stack.material(ell), omega, r);
      const Eigen::Vector2cd outer(sol.layers[static_cast<size_t>(ell) - 1].aL,
                                   sol.layers[static_cast<size_t>(ell) - 1].bL);
      const Eigen::Vector2cd inner(sol.layers[static_cast<size_t>(ell)].aL,
                                   sol.layers[static_cast<size_t>(ell)].bL);
      worst = std::max(worst, (pm * outer - pl * inner).cwiseAbs().maxCoeff());
    }
    const Eigen::Matrix2cd pc =
        detail::p_matrix_n0(stack.material(L), omega, stack.core_radius());
    const Eigen::Vector2cd vc(sol.layers[static_cast<size_t>(L)].aL,
                              sol.layers[static_cast<size_t>(L)].bL);
    return std::max(worst, std::abs((pc.row(1) * vc)(0, 0)));
  }
  for (int ell = 1; ell <= L; ++ell) {
    const double r = stack.radii[static_cast<size_t>(ell) - 1];
    const BlockMatrices pm = p_matrix(stack.material(ell - 1), omega, r, n, ell - 1);
    const BlockMatrices pl = p_matrix(stack.material(ell), omega, r, n, ell);
    worst = std::max(worst,
                     (pm.ln_block * ln_vec(ell - 1) - pl.ln_block * ln_vec(ell)).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (pm.m_block * m_vec(ell - 1) - pl.m_block * m_vec(ell)).cwiseAbs().maxCoeff());
  }
  const BlockMatrices pc = p_matrix(stack.material(L), omega, stack.core_radius(), n, L);
  worst = std::max(worst, (pc.ln_block.bottomRows<2>() * ln_vec(L)).cwiseAbs().maxCoeff());
  worst = std::max(worst, std::abs((pc.m_block.row(1) * m_vec(L))(0, 0)));
  return worst;
}

struct EscRow {
  int n = 0;
  cplx W_LL{}, W_NL{}, W_LN{}, W_NN{}, W_MM{};

  // mode-conversion entries involving M are structural zeros
  cplx entry(ModeKind out, ModeKind in) const {
    if (out == ModeKind::L && in == ModeKind::L) return W_LL;
    if (out == ModeKind::N && in == ModeKind::L) return W_NL;
    if (out == ModeKind::L && in == ModeKind::N) return W_LN;
    if (out == ModeKind::N && in == ModeKind::N) return W_NN;
    if (out == ModeKind::M && in == ModeKind::M) return W_MM;
    return cplx{0.0, 0.0};
  }
};

struct EscTable {
  double omega = 0.0;
  double core_radius = 1.0;
  std::vector<EscRow> rows;  // n = 0..T; the n = 0 row carries only W_LL
  int order() const { return static_cast<int>(rows.size()) - 1; }
};

namespace detail {

inline EscRow esc_row(const LayerStack& stack, double omega, int n) {
  const WaveNumbers w0 = wave_numbers(stack.background, omega);
  const double rc = stack.core_radius();
  const cplx i{0.0, 1.0};
  const cplx zL = -i * w0.cP * w0.cP / (w0.kappaP * rc);
  EscRow row;
  row.n = n;
  if (n == 0) {
    row.W_LL = zL * b_zero_n0(stack, omega);
    return row;
  }
  const cplx zMN =
      -i * (static_cast<double>(n) * (n + 1)) * w0.cS * w0.cS / (w0.kappaS * rc);
  const BZero b = b_zero(r_matrices(stack, omega, n), n, omega);
  row.W_LL = zL * b.LL;
  row.W_LN = zL * b.LN;
  row.W_NL = zMN * b.NL;
  row.W_NN = zMN * b.NN;
  row.W_MM = zMN * b.MM;
  return row;
}

}  // namespace detail

inline EscTable esc_table(const LayerStack& stack, double omega, int T) {
  require_valid(stack);
  if (T < 0) throw std::invalid_argument("esc_table: T >= 0");
  EscTable table;
  table.omega = omega;
  table.core_radius = stack.core_radius();
  table.rows.resize(static_cast<size_t>(T) + 1);
  if (T >= 6) {
    std::vector<std::future<EscRow>> jobs;
    jobs.reserve(table.rows.size());
    for (int n = 0; n <= T; ++n)
      jobs.push_back(std::async(std::launch::async,
                                [&stack, omega, n] { return detail::esc_row(stack, omega, n); }));
    for (int n = 0; n <= T; ++n) table.rows[static_cast<size_t>(n)] = jobs[static_cast<size_t>(n)].get();
  } else {
    for (int n = 0; n <= T; ++n) table.rows[static_cast<size_t>(n)] = detail::esc_row(stack, omega, n);
  }
  return table;
}

// Independent check: one dense linear system over every layer coefficient,
// assembled from the raw interface/boundary conditions and solved by LU.
inline ModeSolution direct_solve_oracle(const LayerStack& stack, double omega, int n,
                                        ModeKind incident) {
  require_valid(stack);
  if (n < 0) throw std::invalid_argument("direct_solve_oracle: n >= 0");
  if (n == 0 && incident != ModeKind::L)
    throw std::invalid_argument("direct_solve_oracle: incident M or N requires n >= 1");
  const int L = stack.L();
  ModeSolution sol;
  sol.incident = incident;
  sol.n = n;
  sol.layers.assign(static_cast<size_t>(L) + 1, LayerCoeffs{});

  auto check_solution = [](const Eigen::MatrixXcd& A, const Eigen::VectorXcd& x,
                           const Eigen::VectorXcd& rhs) {
    if (!x.allFinite() || (A * x - rhs).cwiseAbs().maxCoeff() >
                              1e-6 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
      throw DegenerateFrequencyError("direct_solve_oracle: singular global system");
  };

  if (n == 0) {
    const int nun = 1 + 2 * L;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nun, nun);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nun);
    auto cols = [](int ell) { return 1 + 2 * (ell - 1); };
    int row = 0;
    for (int ell = 1; ell <= L; ++ell) {
      const double r = stack.radii[static_cast<size_t>(ell) - 1];
      const Eigen::Matrix2cd pm = detail::p_matrix_n0(stack.material(ell - 1), omega, r);
      const Eigen::Matrix2cd pl = detail::p_matrix_n0(stack.material(ell), omega, r);
      for (int k = 0; k < 2; ++k, ++row) {
        if (ell == 1) {
          A(row, 0) = pm(k, 1);
          rhs(row) = -pm(k, 0);  // incident a_0^L = 1
        } else {
          A(row, cols(ell - 1)) = pm(k, 0);
          A(row, cols(ell - 1) + 1) = pm(k, 1);
        }
        A(row, cols(ell)) -= pl(k, 0);
        A(row, cols(ell) + 1) -= pl(k, 1);
      }
    }
    const Eigen::Matrix2cd pc = detail::p_matrix_n0(stack.material(L), omega, stack.core_radius());
    if (L == 0) {
      A(row, 0) = pc(1, 1);
      rhs(row) = -pc(1, 0);
    } else {
      A(row, cols(L)) = pc(1, 0);
      A(row, cols(L) + 1) = pc(1, 1);
    }
    const Eigen::VectorXcd x = A.partialPivLu().solve(rhs);
    check_solution(A, x, rhs);
    sol.layers[0].aL = 1.0;
    sol.layers[0].bL = x(0);
    for (int ell = 1; ell <= L; ++ell) {
      sol.layers[static_cast<size_t>(ell)].aL = x(cols(ell));
      sol.layers[static_cast<size_t>(ell)].bL = x(cols(ell) + 1);
    }
    sol.residual = interface_residual(stack, omega, n, sol);
    return sol;
  }

  // L,N block
  {
    const int nun = 2 + 4 * L;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nun, nun);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nun);
    Eigen::Vector4cd a0 = Eigen::Vector4cd::Zero();
    if (incident == ModeKind::L) a0(0) = 1.0;
    if (incident == ModeKind::N) a0(1) = 1.0;
    auto cols = [](int ell) { return 2 + 4 * (ell - 1); };
    int row = 0;
    for (int ell = 1; ell <= L; ++ell) {
      const double r = stack.radii[static_cast<size_t>(ell) - 1];
      const Eigen::Matrix4cd pm = p_matrix(stack.material(ell - 1), omega, r, n, ell - 1).ln_block;
      const Eigen::Matrix4cd pl = p_matrix(stack.material(ell), omega, r, n, ell).ln_block;
      for (int k = 0; k < 4; ++k, ++row) {
        if (ell == 1) {
          A(row, 0) = pm(k, 2);
          A(row, 1) = pm(k, 3);
          rhs(row) = -(pm.row(k) * a0)(0, 0);
        } else {
          A.block(row, cols(ell - 1), 1, 4) = pm.row(k);
        }
        A.block(row, cols(ell), 1, 4) -= pl.row(k);
      }
    }
    const Eigen::Matrix4cd pc =
        p_matrix(stack.material(L), omega, stack.core_radius(), n, L).ln_block;
    for (int k = 2; k < 4; ++k, ++row) {
      if (L == 0) {
        A(row, 0) = pc(k, 2);
        A(row, 1) = pc(k, 3);
        rhs(row) = -(pc.row(k) * a0)(0, 0);
      } else {
        A.block(row, cols(L), 1, 4) = pc.row(k);
      }
    }
    const Eigen::VectorXcd x = A.partialPivLu().solve(rhs);
    check_solution(A, x, rhs);
    sol.layers[0].aL = a0(0);
    sol.layers[0].aN = a0(1);
    sol.layers[0].bL = x(0);
    sol.layers[0].bN = x(1);
    for (int ell = 1; ell <= L; ++ell) {
      LayerCoeffs& c = sol.layers[static_cast<size_t>(ell)];
      c.aL = x(cols(ell));
      c.aN = x(cols(ell) + 1);
      c.bL = x(cols(ell) + 2);
      c.bN = x(cols(ell) + 3);
    }
  }

  // M block
  {
    const int nun = 1 + 2 * L;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nun, nun);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nun);
    const cplx a0 = incident == ModeKind::M ? 1.0 : 0.0;
    auto cols = [](int ell) { return 1 + 2 * (ell - 1); };
    int row = 0;
    for (int ell = 1; ell <= L; ++ell) {
      const double r = stack.radii[static_cast<size_t>(ell) - 1];
      const Eigen::Matrix2cd pm = p_matrix(stack.material(ell - 1), omega, r, n, ell - 1).m_block;
      const Eigen::Matrix2cd pl = p_matrix(stack.material(ell), omega, r, n, ell).m_block;
      for (int k = 0; k < 2; ++k, ++row) {
        if (ell == 1) {
          A(row, 0) = pm(k, 1);
          rhs(row) = -pm(k, 0) * a0;
        } else {
          A(row, cols(ell - 1)) = pm(k, 0);
          A(row, cols(ell - 1) + 1) = pm(k, 1);
        }
        A(row, cols(ell)) -= pl(k, 0);
        A(row, cols(ell) + 1) -= pl(k, 1);
      }
    }
    const Eigen::Matrix2cd pc =
        p_matrix(stack.material(L), omega, stack.core_radius(), n, L).m_block;
    if (L == 0) {
      A(row, 0) = pc(1, 1);
      rhs(row) = -pc(1, 0) * a0;
    } else {
      A(row, cols(L)) = pc(1, 0);
      A(row, cols(L) + 1) = pc(1, 1);
    }
    const Eigen::VectorXcd x = A.partialPivLu().solve(rhs);
    check_solution(A, x, rhs);
    sol.layers[0].aM = a0;
    sol.layers[0].bM = x(0);
    for (int ell = 1; ell <= L; ++ell) {
      sol.layers[static_cast<size_t>(ell)].aM = x(cols(ell));
      sol.layers[static_cast<size_t>(ell)].bM = x(cols(ell) + 1);
    }
  }
  sol.residual = interface_residual(stack, omega, n, sol);
  return sol;
}

}  // namespace escloak
