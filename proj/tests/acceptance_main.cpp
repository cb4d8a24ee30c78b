// Acceptance gate: each criterion prints exactly one [PASS]/[FAIL] line.
// Run with a criterion number (1-10) to execute one check, or with no
// arguments to execute all of them.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "escloak/asymptotics.hpp"
#include "escloak/design.hpp"
#include "escloak/farfield.hpp"
#include "escloak/harmonics.hpp"
#include "escloak/medium.hpp"
#include "escloak/scattering.hpp"
#include "escloak/specfun.hpp"
#include "escloak/transform.hpp"

using namespace escloak;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void note(const std::string& what) {
    detail << (detail.str().empty() ? "" : "; ") << what;
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-30); }

const Material kUnit{1.0, 1.0, 1.0};

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  Outcome out;
  double worst_wronskian = 0.0, worst_recurrence = 0.0, worst_small = 0.0;
  for (int n = 0; n <= 20; ++n)
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
      const double w = sph_bessel_j(n, t) * sph_bessel_y_derivative(n, t) -
                       sph_bessel_j_derivative(n, t) * sph_bessel_y(n, t);
      worst_wronskian = std::max(worst_wronskian, std::abs(t * t * w - 1.0));
    }
  for (int n = 1; n <= 15; ++n)
    for (double t : {0.7, 3.3, 17.1}) {
      const double lj = sph_bessel_j(n - 1, t) + sph_bessel_j(n + 1, t);
      const double rj = (2.0 * n + 1.0) / t * sph_bessel_j(n, t);
      worst_recurrence =
          std::max(worst_recurrence, std::abs(lj - rj) / std::max({std::abs(lj), std::abs(rj), 1e-250}));
      const double ly = sph_bessel_y(n - 1, t) + sph_bessel_y(n + 1, t);
      const double ry = (2.0 * n + 1.0) / t * sph_bessel_y(n, t);
      worst_recurrence =
          std::max(worst_recurrence, std::abs(ly - ry) / std::max({std::abs(ly), std::abs(ry), 1e-250}));
    }
  for (int n = 0; n <= 6; ++n)
    for (double t : {1e-4, 1e-3}) {
      const double j_scaled = sph_bessel_j(n, t) * double_factorial(2 * n + 1) / std::pow(t, n);
      const double y_scaled =
          sph_bessel_y(n, t) * std::pow(t, n + 1) / (-double_factorial(2 * n - 1));
      worst_small = std::max({worst_small, std::abs(j_scaled - 1.0), std::abs(y_scaled - 1.0)});
    }
  out.require(worst_wronskian < 1e-11, "wronskian deviation " + fmt(worst_wronskian));
  out.require(worst_recurrence < 1e-11, "recurrence deviation " + fmt(worst_recurrence));
  out.require(worst_small < 1e-4, "small-argument deviation " + fmt(worst_small));
  if (out.pass)
    out.note("wronskian " + fmt(worst_wronskian) + ", recurrence " + fmt(worst_recurrence) +
             ", small-argument " + fmt(worst_small));
  return out;
}

Outcome criterion_2() {
  Outcome out;
  struct Mode {
    VecKind kind;
    int n, m;
  };
  std::vector<Mode> modes;
  for (int n = 0; n <= 4; ++n)
    for (int m = -n; m <= n; ++m) {
      modes.push_back({VecKind::A, n, m});
      if (n >= 1) {
        modes.push_back({VecKind::B, n, m});
        modes.push_back({VecKind::C, n, m});
      }
    }
  const auto nodes = sphere_quadrature(12);
  std::vector<std::vector<FrameVector3>> values(modes.size());
  for (size_t i = 0; i < modes.size(); ++i) {
    values[i].reserve(nodes.size());
    for (const QuadratureNode& node : nodes)
      values[i].push_back(vec_harm(modes[i].kind, modes[i].n, modes[i].m, node.dir));
  }
  double worst = 0.0;
  for (size_t i = 0; i < modes.size(); ++i)
    for (size_t j = 0; j < modes.size(); ++j) {
      cplx acc{};
      for (size_t q = 0; q < nodes.size(); ++q)
        acc += nodes[q].weight * values[j][q].dot(values[i][q]);
      const double expect = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(acc - expect));
    }
  out.require(worst < 1e-10,
              "orthonormality deviation " + fmt(worst) + " across " +
                  std::to_string(modes.size() * modes.size()) + " pairs");
  if (out.pass)
    out.note("max deviation " + fmt(worst) + " over " +
             std::to_string(modes.size() * modes.size()) + " inner products");
  return out;
}

Outcome criterion_3() {
  Outcome out;
  std::mt19937_64 gen(20260101);
  const auto uni = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  };
  double worst_b = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int L = static_cast<int>(gen() % 4);
    std::vector<Material> layers;
    for (int i = 0; i < L; ++i)
      layers.push_back(Material{uni(0.05, 3.0), uni(0.05, 3.0), uni(0.05, 3.0)});
    const LayerStack stack = make_stack(kUnit, layers);
    const double omega = uni(0.5, 2.0);
    for (int n = 0; n <= 4; ++n)
      for (ModeKind inc : {ModeKind::L, ModeKind::N, ModeKind::M}) {
        if (n == 0 && inc != ModeKind::L) continue;
        const ModeSolution a = solve_modes(stack, omega, n, inc);
        const ModeSolution d = direct_solve_oracle(stack, omega, n, inc);
        worst_res = std::max({worst_res, a.residual, d.residual});
        if (inc == ModeKind::M) {
          worst_b = std::max(worst_b, rel(a.layers[0].bM, d.layers[0].bM));
        } else {
          worst_b = std::max(worst_b, rel(a.layers[0].bL, d.layers[0].bL));
          if (n >= 1) worst_b = std::max(worst_b, rel(a.layers[0].bN, d.layers[0].bN));
        }
      }
  }
  out.require(worst_b < 1e-9, "transfer vs direct relative difference " + fmt(worst_b));
  out.require(worst_res < 1e-10, "interface residual " + fmt(worst_res));
  if (out.pass) out.note("max rel " + fmt(worst_b) + ", max residual " + fmt(worst_res));
  return out;
}

Outcome criterion_4() {
  Outcome out;
  const LayerStack stack =
      make_stack(kUnit, {Material{2.9, 0.7, 0.9}, Material{0.5, 0.1, 2.7}}, {2.0, 1.5, 1.0});
  bool solver_zeros = true;
  for (int n = 1; n <= 3; ++n) {
    const ModeSolution m_inc = solve_modes(stack, 1.3, n, ModeKind::M);
    const ModeSolution l_inc = solve_modes(stack, 1.3, n, ModeKind::L);
    const ModeSolution n_inc = solve_modes(stack, 1.3, n, ModeKind::N);
    solver_zeros = solver_zeros && m_inc.layers[0].bL == cplx{} && m_inc.layers[0].bN == cplx{} &&
                   l_inc.layers[0].bM == cplx{} && n_inc.layers[0].bM == cplx{};
  }
  out.require(solver_zeros, "mode-conversion coefficients involving M are not exactly zero");

  const EscTable table = esc_table(stack, 1.3, 3);
  bool api_zeros = true;
  for (const EscRow& row : table.rows)
    for (ModeKind other : {ModeKind::L, ModeKind::N})
      api_zeros = api_zeros && row.entry(ModeKind::M, other) == cplx{} &&
                  row.entry(other, ModeKind::M) == cplx{};
  out.require(api_zeros, "table exposes nonzero M-conversion entries");
  const EscRow& row0 = table.rows[0];
  out.require(row0.W_LL != cplx{} && row0.W_NN == cplx{} && row0.W_MM == cplx{} &&
                  row0.W_NL == cplx{} && row0.W_LN == cplx{},
              "n = 0 row carries entries besides W_LL");

  const LayerStack matched = make_stack(kUnit, {kUnit, kUnit}, {2.0, 1.5, 1.0});
  const EscTable a = esc_table(matched, 1.3, 3);
  const EscTable bare = esc_table(make_stack(kUnit, {}, {1.0}), 1.3, 3);
  double worst = 0.0;
  for (size_t r = 0; r < a.rows.size(); ++r)
    for (ModeKind o : {ModeKind::L, ModeKind::N, ModeKind::M})
      for (ModeKind i : {ModeKind::L, ModeKind::N, ModeKind::M})
        worst = std::max(worst, std::abs(a.rows[r].entry(o, i) - bare.rows[r].entry(o, i)));
  out.require(worst < 1e-12, "background-matched deviation " + fmt(worst));
  if (out.pass) out.note("background-matched deviation " + fmt(worst));
  return out;
}

Outcome criterion_5() {
  Outcome out;
  const LayerStack stack =
      make_stack(kUnit, {Material{2.9, 0.7, 0.9}, Material{0.5, 0.1, 2.7}}, {2.0, 1.5, 1.0});
  const double omega = 1.3;
  const EscTable ref = esc_table(stack, omega, 3);
  double worst = 0.0;
  for (double s : {0.5, 2.0}) {
    const EscTable scaled = esc_table(stack.scaled(s), omega / s, 3);
    for (size_t r = 0; r < ref.rows.size(); ++r)
      for (ModeKind o : {ModeKind::L, ModeKind::N, ModeKind::M})
        for (ModeKind i : {ModeKind::L, ModeKind::N, ModeKind::M}) {
          const cplx w = ref.rows[r].entry(o, i);
          if (w == cplx{}) continue;
          worst = std::max(worst, rel(scaled.rows[r].entry(o, i), w));
        }
  }
  out.require(worst < 1e-10, "scale identity deviation " + fmt(worst));
  if (out.pass) out.note("max relative deviation " + fmt(worst) + " for s in {0.5, 2}");
  return out;
}

Outcome criterion_6() {
  Outcome out;
  std::mt19937_64 gen(606060);
  const auto uni = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  };
  const LayerStack bare = make_stack(kUnit, {}, {1.0});
  const Material layer{uni(0.05, 3.0), uni(0.05, 3.0), uni(0.05, 3.0)};
  const LayerStack one = make_stack(kUnit, {layer});

  std::vector<double> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(1e-3 * std::pow(10.0, i / 7.0));

  const std::vector<std::pair<ModeKind, const char*>> pairs = {
      {ModeKind::L, "LL"}, {ModeKind::N, "NN"}, {ModeKind::M, "MM"}};
  for (const auto& [name, stack] : {std::pair<const char*, const LayerStack*>{"bare", &bare},
                                    {"1-layer", &one}}) {
    for (int n : {1, 2})
      for (const auto& [kind, label] : pairs) {
        const ScalingReport rep = scaling_exponent(*stack, n, kind, kind, grid);
        const double bound = 2.0 * n - 0.1;
        out.require(rep.fitted_slope >= bound,
                    std::string(name) + " " + label + " n=" + std::to_string(n) + " slope " +
                        fmt(rep.fitted_slope) + " < " + fmt(bound));
      }
  }

  double worst_ratio = 0.0;
  int skipped = 0;
  for (const QEntryCheck& chk : q_entry_asymptotic_check(Material{2.9, 0.7, 0.9}, 3, 1e-3)) {
    if (chk.skipped) {
      ++skipped;
      continue;
    }
    worst_ratio = std::max(worst_ratio, std::abs(chk.ratio - cplx{1.0, 0.0}));
  }
  out.require(skipped == 0, "unexpected skipped Q-entry checks");
  out.require(worst_ratio < 0.01, "Q-entry ratio deviation " + fmt(worst_ratio));
  if (!out.pass)
    out.note("diagonal L/N channels saturate at slope 2 (conversion-free quadratic rate); "
             "only the M channel steepens to 2n");
  else
    out.note("Q-entry ratio deviation " + fmt(worst_ratio));
  return out;
}

Outcome criterion_7() {
  Outcome out;
  const Material bg{0.58, 0.039, 1.0};
  struct Case {
    const char* name;
    ModeKind column;
    Material one;
    Material two_outer, two_inner;
  };
  const std::vector<Case> cases = {
      {"L", ModeKind::L, {2.9, 0.7, 0.9}, {0.1, 1.9, 0.1}, {0.5, 0.1, 1.6}},
      {"N", ModeKind::N, {0.5, 0.1, 2.7}, {1.9, 1.5, 1.1}, {1.5, 1.1, 0.6}},
      {"M", ModeKind::M, {0.1, 2.5, 1.2}, {0.1, 1.9, 1.6}, {0.1, 0.1, 0.1}},
  };
  for (const Case& c : cases) {
    DesignProblem pb;
    pb.background = bg;
    pb.omega = 1.0;
    pb.T = 2;
    pb.weights = ModeWeights::column(c.column);

    pb.layer_count = 1;
    pb.radii = {2.0, 1.0};
    const double j_bare = bare_reference(pb);
    const double j_one = objective(pb, {c.one});

    pb.layer_count = 2;
    pb.radii = {2.0, 1.5, 1.0};
    const double j_two = objective(pb, {c.two_outer, c.two_inner});

    out.require(j_one < j_bare, std::string(c.name) + ": 1-layer " + fmt(j_one) +
                                    " not below bare " + fmt(j_bare));
    out.require(j_two < j_bare, std::string(c.name) + ": 2-layer " + fmt(j_two) +
                                    " not below bare " + fmt(j_bare));
    out.require(j_two < j_one, std::string(c.name) + ": 2-layer " + fmt(j_two) +
                                   " not below 1-layer " + fmt(j_one));
    if (out.pass)
      out.note(std::string(c.name) + ": " + fmt(j_bare) + " > " + fmt(j_one) + " > " +
               fmt(j_two));
  }
  return out;
}

Outcome criterion_8() {
  Outcome out;
  DesignProblem pb;  // 1-layer, omega = 1, T = 2, uniform weights
  const double j_bare = bare_reference(pb);
  const auto runs = multistart(pb, 16, 2026);
  bool monotone = true;
  for (const DesignResult& r : runs)
    for (size_t k = 0; k + 1 < r.objective_trace.size(); ++k)
      monotone = monotone && r.objective_trace[k + 1] <= r.objective_trace[k];
  out.require(monotone, "an objective trace increased");
  const DesignResult& best = best_result(runs);
  out.require(best.final_objective <= 0.1 * j_bare,
              "best objective " + fmt(best.final_objective) + " above 0.1 x bare " +
                  fmt(0.1 * j_bare));
  const auto again = multistart(pb, 16, 2026);
  bool deterministic = true;
  for (size_t i = 0; i < runs.size(); ++i)
    deterministic = deterministic && again[i].final_objective == runs[i].final_objective &&
                    again[i].objective_trace == runs[i].objective_trace;
  out.require(deterministic, "repeat run diverged under the same seed");
  if (out.pass)
    out.note("best/bare = " + fmt(best.final_objective / j_bare) + " from 16 starts");
  return out;
}

Outcome criterion_9() {
  Outcome out;
  std::mt19937_64 gen(909090);
  const auto uni = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  };
  GammaCoeffs g;
  g.T = 3;
  g.L.assign(16, cplx{});
  g.M.assign(16, cplx{});
  g.N.assign(16, cplx{});
  for (size_t k = 0; k < 16; ++k) {
    g.L[k] = cplx{uni(-1.0, 1.0), uni(-1.0, 1.0)};
    if (k >= 1) {
      g.M[k] = cplx{uni(-1.0, 1.0), uni(-1.0, 1.0)};
      g.N[k] = cplx{uni(-1.0, 1.0), uni(-1.0, 1.0)};
    }
  }
  double quad = 0.0;
  for (const QuadratureNode& node : sphere_quadrature(16)) {
    const FarFieldSample s = far_field_amplitude(g, node.dir, kUnit, 1.0);
    quad += node.weight * (s.uP.squaredNorm() + s.uS.squaredNorm());
  }
  const double sum = total_scattering_strength(g, kUnit, 1.0);
  const double parseval = std::abs(quad - sum) / sum;
  out.require(parseval < 1e-8, "Parseval deviation " + fmt(parseval));

  const WaveNumbers w = wave_numbers(kUnit, 1.0);
  const Eigen::Vector3d d = Eigen::Vector3d(0.3, -0.5, 0.81).normalized();
  const Eigen::Vector3d q = (d.cross(Eigen::Vector3d(0.2, 0.9, -0.1))).cross(d).normalized();
  const int K = 12;
  double worst_rec = 0.0;
  for (WaveType kind : {WaveType::pressure, WaveType::shear}) {
    IncidentWave wave;
    wave.kind = kind;
    wave.d = d;
    wave.q = q;
    const IncidentCoeffs inc = plane_wave_coeffs(wave, K, w.kappaP, w.kappaS);
    for (const Eigen::Vector3d& raw :
         {Eigen::Vector3d(0.1, -0.9, -0.4), Eigen::Vector3d(0.0, 0.0, 0.77),
          Eigen::Vector3d(-0.6, 0.25, 0.33)}) {
      const double r = raw.norm();
      const SphericalDirection dir = direction_of(raw);
      Eigen::Vector3cd sum_vec = Eigen::Vector3cd::Zero();
      for (int k = 0; k <= K; ++k)
        for (int l = -k; l <= k; ++l) {
          sum_vec += inc.a_at(k, l) *
                     frame_to_cartesian(debye_potential({ModeKind::L, k, l}, Family::entire, r,
                                                        dir, w.kappaP, w.kappaS),
                                        dir);
          if (k >= 1) {
            const double rt = std::sqrt(static_cast<double>(k) * (k + 1));
            sum_vec += (inc.b_at(k, l) / rt) *
                       frame_to_cartesian(debye_potential({ModeKind::M, k, l}, Family::entire, r,
                                                          dir, w.kappaP, w.kappaS),
                                          dir);
            sum_vec += (inc.c_at(k, l) / rt) *
                       frame_to_cartesian(debye_potential({ModeKind::N, k, l}, Family::entire, r,
                                                          dir, w.kappaP, w.kappaS),
                                          dir);
          }
        }
      const Eigen::Vector3cd exact =
          kind == WaveType::pressure
              ? Eigen::Vector3cd(d.cast<cplx>() *
                                 std::exp(cplx{0.0, 1.0} * w.kappaP * d.dot(raw)))
              : Eigen::Vector3cd(q.cast<cplx>() *
                                 std::exp(cplx{0.0, 1.0} * w.kappaS * d.dot(raw)));
      worst_rec = std::max(worst_rec, (sum_vec - exact).cwiseAbs().maxCoeff());
    }
  }
  out.require(worst_rec < 1e-6, "plane-wave reconstruction error " + fmt(worst_rec));
  if (out.pass)
    out.note("Parseval " + fmt(parseval) + ", reconstruction " + fmt(worst_rec));
  return out;
}

Outcome criterion_10() {
  Outcome out;
  double worst_cont = 0.0;
  for (double eps : {0.1, 0.37}) {
    const RadialMap map = blow_up_map(eps);
    for (double r : {eps, 2.0 * eps, 2.0}) {
      for (const Eigen::Vector3d& dir :
           {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.36, -0.8, 0.48)}) {
        const Eigen::Vector3d x = r * dir.normalized();
        const double gap =
            (apply_map(map, x, Side::below) - apply_map(map, x, Side::above)).norm();
        worst_cont = std::max(worst_cont, gap);
      }
    }
  }
  out.require(worst_cont < 1e-12, "branch-radius discontinuity " + fmt(worst_cont));

  const ElasticityTensor iso = ElasticityTensor::isotropic(2.0, 0.5);
  const Eigen::Vector3d x(0.5, 0.3, 0.2);
  {
    const TransformedPoint p = pushforward(iso, 1.5, identity_map(), x);
    bool exact = p.image == x && p.rho == 1.5;
    for (size_t i = 0; i < iso.c.size(); ++i) exact = exact && p.tensor.c[i] == iso.c[i];
    out.require(exact, "identity push-forward is not exact");
  }
  {
    const TransformedPoint p = pushforward(iso, 1.5, scaling_map(0.25), x);
    bool exact = p.image == Eigen::Vector3d(4.0 * x) && p.rho == 1.5 / 64.0;
    for (size_t i = 0; i < iso.c.size(); ++i) exact = exact && p.tensor.c[i] == iso.c[i] / 4.0;
    out.require(exact, "dilation push-forward is not exact");
  }
  {
    const TransformedPoint p = pushforward(iso, 1.5, blow_up_map(0.5), x);
    out.require(p.tensor.max_asymmetry_minor_left() > 1e-6 &&
                    p.tensor.max_asymmetry_minor_right() > 1e-6 && !p.tensor.minor_left &&
                    !p.tensor.minor_right,
                "minor-symmetry breakage not detected at the mid-shell point");
    out.require(p.tensor.max_asymmetry_major() <= 1e-12 && p.tensor.major,
                "major symmetry lost under push-forward");
  }

  double worst_jac = 0.0;
  const RadialMap map = blow_up_map(0.1);
  const double h = 1e-6;
  for (double r : {0.05, 0.15, 1.0, 2.5}) {
    const Eigen::Vector3d p = r * Eigen::Vector3d(0.36, -0.8, 0.48).normalized();
    const Eigen::Matrix3d an = jacobian(map, p);
    Eigen::Matrix3d fd;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d hi = p, lo = p;
      hi[j] += h;
      lo[j] -= h;
      fd.col(j) = (apply_map(map, hi) - apply_map(map, lo)) / (2.0 * h);
    }
    worst_jac = std::max(worst_jac, (an - fd).cwiseAbs().maxCoeff());
  }
  out.require(worst_jac < 1e-7, "Jacobian finite-difference deviation " + fmt(worst_jac));
  if (out.pass)
    out.note("continuity " + fmt(worst_cont) + ", Jacobian deviation " + fmt(worst_jac));
  return out;
}

struct Criterion {
  const char* title;
  double time_limit;  // seconds; 0 = none stated
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {"special-function invariants", 5.0, criterion_1},
    {"vector harmonic orthonormality", 10.0, criterion_2},
    {"oracle equivalence on 20 random stacks", 30.0, criterion_3},
    {"structural zeros and background-matched table", 0.0, criterion_4},
    {"scale/frequency identity", 0.0, criterion_5},
    {"low-frequency slopes and Q-entry asymptotics", 60.0, criterion_6},
    {"layered parameter-set objective orderings", 60.0, criterion_7},
    {"optimizer contract", 300.0, criterion_8},
    {"far-field Parseval and plane-wave reconstruction", 0.0, criterion_9},
    {"transform suite", 0.0, criterion_10},
};

bool run_criterion(size_t idx) {
  const Criterion& c = kCriteria[idx];
  const auto start = std::chrono::steady_clock::now();
  Outcome out = c.run();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.time_limit > 0.0 && seconds > c.time_limit)
    out.require(false, "runtime " + fmt(seconds) + " s exceeds " + fmt(c.time_limit) + " s");
  std::printf("[%s] criterion %zu: %s (%s%s%.2f s)\n", out.pass ? "PASS" : "FAIL", idx + 1,
              c.title, out.detail.str().c_str(), out.detail.str().empty() ? "" : "; ", seconds);
  std::fflush(stdout);
  return out.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], kCriteria.size());
      return 2;
    }
    return run_criterion(static_cast<size_t>(k - 1)) ? 0 : 1;
  }
  bool all = true;
  for (size_t i = 0; i < kCriteria.size(); ++i) all = run_criterion(i) && all;
  return all ? 0 : 1;
}
