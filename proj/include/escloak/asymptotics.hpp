#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "escloak/medium.hpp"
#include "escloak/scattering.hpp"

namespace escloak {

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScalingReport {
  int n = 0;
  ModeKind out = ModeKind::L;
  ModeKind in = ModeKind::L;
  std::vector<double> tau_grid;  // points that entered the fit
  std::vector<double> values;    // |W| at those points
  double fitted_slope = 0.0;
  double r_squared = 0.0;
};

namespace detail {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

inline LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t k = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double dx = std::log(xs[i]) - mx, dy = std::log(ys[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double resid = std::log(ys[i]) - (fit.intercept + fit.slope * std::log(xs[i]));
    ss_res += resid * resid;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

constexpr double kUnderflowFloor = 1e-280;

}  // namespace detail

// Least-squares slope of log|W_n| against log(tau), realizing tau as the
// frequency at fixed geometry (equivalent to shrinking the structure by the
// scale identity of esc_table).
inline ScalingReport scaling_exponent(const LayerStack& stack, int n, ModeKind out, ModeKind in,
                                      const std::vector<double>& tau_grid) {
  if (n < 0) throw std::invalid_argument("scaling_exponent: n must be >= 0");
  for (size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > 0.0) || tau_grid[i] > 0.1)
      throw std::invalid_argument("scaling_exponent: tau grid must lie in (0, 0.1]");
    if (i > 0 && tau_grid[i] <= tau_grid[i - 1])
      throw std::invalid_argument("scaling_exponent: tau grid must be strictly increasing");
  }

  ScalingReport report;
  report.n = n;
  report.out = out;
  report.in = in;
  for (double tau : tau_grid) {
    const EscTable table = esc_table(stack, tau, n);
    const double mag = std::abs(table.rows[static_cast<size_t>(n)].entry(out, in));
    if (!std::isfinite(mag) || mag < detail::kUnderflowFloor) continue;
    report.tau_grid.push_back(tau);
    report.values.push_back(mag);
  }
  if (report.tau_grid.size() < 3)
    throw InsufficientDataError(
        "scaling_exponent: fewer than 3 usable points above the underflow floor");

  detail::LogLogFit fit = detail::fit_loglog(report.tau_grid, report.values);
  if (fit.r_squared < 0.999 && report.tau_grid.size() > 3) {
    // drop the largest tau once; the next-order term contaminates it first
    report.tau_grid.pop_back();
    report.values.pop_back();
    fit = detail::fit_loglog(report.tau_grid, report.values);
  }
  report.fitted_slope = fit.slope;
  report.r_squared = fit.r_squared;
  return report;
}

struct QEntryCheck {
  int row = 0, col = 0;  // 1-based position in the 2x4 core block
  cplx exact{};
  cplx leading{};
  cplx ratio{};
  bool skipped = false;
  std::string note;
};

namespace detail {

inline double double_factorial_odd(int k) {  // (2k - 1)!!
  double v = 1.0;
  for (int j = 2 * k - 1; j >= 3; j -= 2) v *= j;
  return v;
}

}  // namespace detail

// Compares the traction-row core entries against their low-frequency leading
// terms.  Entries whose leading coefficient vanishes (the (n-1) factors at
// n = 1) are skipped with a note.
inline std::vector<QEntryCheck> q_entry_asymptotic_check(const Material& mat, int n, double tau) {
  if (n < 1) throw std::invalid_argument("q_entry_asymptotic_check: n must be >= 1");
  if (!(tau > 0.0) || tau > 1e-2)
    throw std::invalid_argument("q_entry_asymptotic_check: tau must lie in (0, 1e-2]");

  const WaveNumbers w = wave_numbers(mat, 1.0);  // kappa at omega = tau is tau / c
  const double tP = 1.0 / w.cP, tS = 1.0 / w.cS;
  const double nd = static_cast<double>(n);
  const double phi_n = detail::double_factorial_odd(n);
  const double phi_n1 = detail::double_factorial_odd(n + 1);
  const double rt = std::sqrt(nd * (nd + 1.0));
  const cplx i{0.0, 1.0};

  const double grow = std::pow(tau, nd - 1.0);   // entire-family columns
  const double decay = std::pow(tau, -nd - 2.0);  // radiating-family columns
  const cplx lead[2][4] = {
      {nd * (nd - 1.0) * std::pow(tP, nd - 1.0) / phi_n1 * grow,
       nd * (nd + 1.0) * (nd - 1.0) * std::pow(tS, nd - 1.0) / phi_n1 * grow,
       -i * phi_n * (nd + 1.0) * (nd + 2.0) * std::pow(tP, -nd - 2.0) * decay,
       i * phi_n * nd * (nd + 1.0) * (nd + 2.0) * std::pow(tS, -nd - 2.0) * decay},
      {rt * (nd - 1.0) * std::pow(tP, nd - 1.0) / phi_n1 * grow,
       rt * (nd * nd - 1.0) * std::pow(tS, nd - 1.0) / phi_n1 * grow,
       i * phi_n * rt * (nd + 2.0) * std::pow(tP, -nd - 2.0) * decay,
       -i * phi_n * rt * nd * (nd + 2.0) * std::pow(tS, -nd - 2.0) * decay}};

  const BlockMatrices q = q_matrix(mat, tau, n, 1.0);
  std::vector<QEntryCheck> checks;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) {
      QEntryCheck entry;
      entry.row = r + 1;
      entry.col = c + 1;
      entry.exact = q.ln_block(r, c);
      entry.leading = lead[r][c];
      if (entry.leading == cplx{}) {
        entry.skipped = true;
        entry.note = "leading coefficient vanishes at this order";
      } else {
        entry.ratio = entry.exact / entry.leading;
      }
      checks.push_back(entry);
    }
  }
  return checks;
}

struct DecayReport {
  std::vector<int> orders;       // n = 0..T
  std::vector<double> magnitudes;  // |W_n^{LL}|
  double best_C = 0.0;           // smallest C with |W_n| <= (C/n)^{2n-2} for n >= 2
  int monotone_from = -1;        // first n with strict decrease through T
  bool eventually_decreasing = false;
};

inline DecayReport decay_in_n_report(const EscTable& table) {
  if (table.order() < 4)
    throw std::invalid_argument("decay_in_n_report: table order must be >= 4");
  DecayReport report;
  for (const EscRow& row : table.rows) {
    report.orders.push_back(row.n);
    report.magnitudes.push_back(std::abs(row.W_LL));
  }
  const size_t count = report.magnitudes.size();
  for (size_t k = 2; k < count; ++k) {
    const double mag = report.magnitudes[k];
    if (mag <= 0.0) continue;
    const double implied =
        static_cast<double>(k) * std::pow(mag, 1.0 / (2.0 * static_cast<double>(k) - 2.0));
    report.best_C = std::max(report.best_C, implied);
  }
  int from = -1;
  for (size_t k = 0; k + 1 < count; ++k) {
    const bool drops = report.magnitudes[k + 1] < report.magnitudes[k] ||
                       report.magnitudes[k + 1] < 1e-300;
    if (drops) {
      if (from < 0) from = static_cast<int>(k);
    } else {
      from = -1;
    }
  }
  report.monotone_from = from;
  report.eventually_decreasing = from >= 0;
  return report;
}

}  // namespace escloak
