#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "escloak/asymptotics.hpp"
#include "escloak/medium.hpp"
#include "escloak/scattering.hpp"

using namespace escloak;
using Catch::Approx;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return g;
}

LayerStack bare_cavity() { return make_stack(Material{1.0, 1.0, 1.0}, {}, {1.0}); }

}  // namespace

TEST_CASE("low-frequency scaling exponents of the bare cavity", "[asymptotics]") {
  const LayerStack bare = bare_cavity();
  const std::vector<double> grid = log_grid(1e-3, 1e-2, 8);

  const ScalingReport mm1 = scaling_exponent(bare, 1, ModeKind::M, ModeKind::M, grid);
  REQUIRE(mm1.fitted_slope >= 1.9);
  REQUIRE(mm1.fitted_slope == Approx(4.0).margin(0.05));
  REQUIRE(mm1.r_squared > 0.9999);
  REQUIRE(mm1.tau_grid.size() == 8);

  const ScalingReport ll0 = scaling_exponent(bare, 0, ModeKind::L, ModeKind::L, grid);
  REQUIRE(ll0.fitted_slope >= -0.1);
  REQUIRE(ll0.fitted_slope == Approx(2.0).margin(0.05));

  const ScalingReport ll1 = scaling_exponent(bare, 1, ModeKind::L, ModeKind::L, grid);
  REQUIRE(ll1.fitted_slope == Approx(2.0).margin(0.05));
  const ScalingReport nn1 = scaling_exponent(bare, 1, ModeKind::N, ModeKind::N, grid);
  REQUIRE(nn1.fitted_slope == Approx(2.0).margin(0.05));

  // the conversion-free quadratic rate persists at n = 2 for the L/N diagonal;
  // only the M channel steepens
  const ScalingReport ll2 = scaling_exponent(bare, 2, ModeKind::L, ModeKind::L, grid);
  REQUIRE(ll2.fitted_slope == Approx(2.0).margin(0.05));
  const ScalingReport mm2 = scaling_exponent(bare, 2, ModeKind::M, ModeKind::M, grid);
  REQUIRE(mm2.fitted_slope >= 3.9);
  REQUIRE(mm2.fitted_slope == Approx(4.0).margin(0.05));

  const ScalingReport mm3 = scaling_exponent(bare, 3, ModeKind::M, ModeKind::M, grid);
  REQUIRE(mm3.fitted_slope == Approx(6.0).margin(0.05));
}

TEST_CASE("scaling exponents of a layered stack", "[asymptotics]") {
  const LayerStack one =
      make_stack(Material{1.0, 1.0, 1.0}, {Material{2.9, 0.7, 0.9}}, {2.0, 1.0});
  const std::vector<double> grid = log_grid(1e-3, 1e-2, 8);
  for (auto kind : {ModeKind::L, ModeKind::M, ModeKind::N}) {
    const ScalingReport r = scaling_exponent(one, 1, kind, kind, grid);
    REQUIRE(r.fitted_slope >= 1.9);
    REQUIRE(r.r_squared > 0.999);
  }
}

TEST_CASE("scaling exponent input validation", "[asymptotics]") {
  const LayerStack bare = bare_cavity();
  REQUIRE_THROWS_AS(scaling_exponent(bare, 1, ModeKind::L, ModeKind::L, {1e-3, 1e-3, 1e-2}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(scaling_exponent(bare, 1, ModeKind::L, ModeKind::L, {1e-3, 1e-2, 0.2}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(scaling_exponent(bare, 1, ModeKind::L, ModeKind::L, {-1e-3, 1e-2}),
                    std::invalid_argument);
  // two usable points are not enough for a slope with a quality figure
  REQUIRE_THROWS_AS(scaling_exponent(bare, 1, ModeKind::L, ModeKind::L, {1e-3, 1e-2}),
                    InsufficientDataError);
  // structural zeros drop every sample
  REQUIRE_THROWS_AS(
      scaling_exponent(bare, 1, ModeKind::L, ModeKind::M, log_grid(1e-3, 1e-2, 8)),
      InsufficientDataError);
}

TEST_CASE("log-log fit helper", "[asymptotics]") {
  std::vector<double> xs, ys;
  for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    xs.push_back(x);
    ys.push_back(3.0 * std::pow(x, 2.5));
  }
  const detail::LogLogFit fit = detail::fit_loglog(xs, ys);
  REQUIRE(fit.slope == Approx(2.5).epsilon(1e-12));
  REQUIRE(fit.intercept == Approx(std::log(3.0)).epsilon(1e-12));
  REQUIRE(fit.r_squared == Approx(1.0).margin(1e-12));

  ys[2] *= 1.8;  // a kicked point degrades the quality figure
  const detail::LogLogFit rough = detail::fit_loglog(xs, ys);
  REQUIRE(rough.r_squared < 0.999);
}

TEST_CASE("core block entries match their leading-order forms", "[asymptotics]") {
  SECTION("n = 3 at the reference material") {
    const auto checks = q_entry_asymptotic_check(Material{1.0, 1.0, 1.0}, 3, 1e-3);
    REQUIRE(checks.size() == 8);
    for (const QEntryCheck& c : checks) {
      INFO("entry Q" << c.row << c.col);
      REQUIRE_FALSE(c.skipped);
      REQUIRE(std::abs(c.ratio - cplx{1.0, 0.0}) < 0.01);
    }
  }

  SECTION("n = 2 at a stiff material") {
    for (const QEntryCheck& c : q_entry_asymptotic_check(Material{2.9, 0.7, 0.9}, 2, 1e-3)) {
      INFO("entry Q" << c.row << c.col);
      REQUIRE_FALSE(c.skipped);
      REQUIRE(std::abs(c.ratio - cplx{1.0, 0.0}) < 0.01);
    }
  }

  SECTION("n = 1 skips the entries with vanishing coefficients") {
    const auto checks = q_entry_asymptotic_check(Material{1.0, 1.0, 1.0}, 1, 1e-3);
    int skipped = 0;
    for (const QEntryCheck& c : checks) {
      INFO("entry Q" << c.row << c.col);
      const bool grows_with_n = c.col <= 2;  // entire-family columns carry the (n-1) factors
      if (grows_with_n) {
        REQUIRE(c.skipped);
        REQUIRE_FALSE(c.note.empty());
        REQUIRE(std::abs(c.exact) < 1e-6);  // vanishes faster than tau^{n-1}
        ++skipped;
      } else {
        REQUIRE_FALSE(c.skipped);
        REQUIRE(std::abs(c.ratio - cplx{1.0, 0.0}) < 1e-3);
      }
    }
    REQUIRE(skipped == 4);
  }

  SECTION("validation") {
    REQUIRE_THROWS_AS(q_entry_asymptotic_check(Material{1.0, 1.0, 1.0}, 0, 1e-3),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(q_entry_asymptotic_check(Material{1.0, 1.0, 1.0}, 2, 0.1),
                      std::invalid_argument);
  }
}

TEST_CASE("decay of the diagonal L entries in n", "[asymptotics]") {
  const LayerStack bare = bare_cavity();

  SECTION("unit frequency") {
    const DecayReport d = decay_in_n_report(esc_table(bare, 1.0, 8));
    REQUIRE(d.orders.size() == 9);
    REQUIRE(d.monotone_from == 0);
    REQUIRE(d.eventually_decreasing);
    for (size_t k = 3; k < 8; ++k) REQUIRE(d.magnitudes[k + 1] < d.magnitudes[k]);
    REQUIRE(d.best_C == Approx(0.7132).epsilon(1e-3));
    for (size_t k = 2; k < d.magnitudes.size(); ++k) {
      const double bound =
          std::pow(d.best_C / static_cast<double>(k), 2.0 * static_cast<double>(k) - 2.0);
      REQUIRE(d.magnitudes[k] <= bound * (1.0 + 1e-12));
    }
  }

  SECTION("lower frequency decays from the start and faster") {
    const DecayReport slow = decay_in_n_report(esc_table(bare, 0.1, 8));
    const DecayReport fast = decay_in_n_report(esc_table(bare, 1.0, 8));
    REQUIRE(slow.monotone_from <= fast.monotone_from);
    REQUIRE(slow.magnitudes[8] / slow.magnitudes[3] < fast.magnitudes[8] / fast.magnitudes[3]);
  }

  SECTION("zero table and short table") {
    EscTable zeros;
    zeros.omega = 1.0;
    for (int n = 0; n <= 4; ++n) {
      EscRow row;
      row.n = n;
      zeros.rows.push_back(row);
    }
    const DecayReport d = decay_in_n_report(zeros);
    REQUIRE(d.best_C == 0.0);
    REQUIRE(d.eventually_decreasing);
    REQUIRE(d.monotone_from == 0);

    zeros.rows.pop_back();
    REQUIRE_THROWS_AS(decay_in_n_report(zeros), std::invalid_argument);
  }
}
