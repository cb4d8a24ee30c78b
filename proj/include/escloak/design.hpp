#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "escloak/medium.hpp"
#include "escloak/scattering.hpp"

namespace escloak {

struct ModeWeights {
  double w[3][3] = {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};

  double& at(ModeKind out, ModeKind in) { return w[static_cast<int>(out)][static_cast<int>(in)]; }
  double at(ModeKind out, ModeKind in) const {
    return w[static_cast<int>(out)][static_cast<int>(in)];
  }

  static ModeWeights zero() {
    ModeWeights m;
    for (auto& row : m.w) std::fill(std::begin(row), std::end(row), 0.0);
    return m;
  }
  // weights selecting the column excited by a pure incident mode
  static ModeWeights column(ModeKind in) {
    ModeWeights m = zero();
    for (ModeKind out : {ModeKind::L, ModeKind::M, ModeKind::N}) m.at(out, in) = 1.0;
    return m;
  }
};

struct DesignProblem {
  int layer_count = 1;
  Material background;
  std::vector<double> radii;  // empty -> default_radii(layer_count)
  double omega = 1.0;
  int T = 2;
  std::vector<double> lower, upper;  // per-parameter boxes; empty -> 0.05 / 3.0
  ModeWeights weights;

  std::vector<double> stack_radii() const {
    return radii.empty() ? default_radii(layer_count) : radii;
  }
  double lo(size_t i) const { return lower.empty() ? 0.05 : lower.at(i); }
  double hi(size_t i) const { return upper.empty() ? 3.0 : upper.at(i); }
  size_t dim() const { return static_cast<size_t>(layer_count) * 3; }
};

enum class OptStatus { converged, max_iters, stalled };

struct DesignResult {
  std::vector<Material> materials;
  std::vector<double> objective_trace;
  double final_objective = 0.0;
  OptStatus status = OptStatus::converged;
  std::uint64_t seed = 0;  // 0 when the start point was supplied explicitly
};

namespace detail {

inline Eigen::VectorXd to_flat(const std::vector<Material>& mats) {
  Eigen::VectorXd x(3 * mats.size());
  for (size_t k = 0; k < mats.size(); ++k) {
    x[3 * k] = mats[k].lambda;
    x[3 * k + 1] = mats[k].mu;
    x[3 * k + 2] = mats[k].rho;
  }
  return x;
}

inline std::vector<Material> from_flat(const Eigen::VectorXd& x) {
  std::vector<Material> mats(static_cast<size_t>(x.size()) / 3);
  for (size_t k = 0; k < mats.size(); ++k)
    mats[k] = Material{x[3 * k], x[3 * k + 1], x[3 * k + 2]};
  return mats;
}

inline void check_problem(const DesignProblem& pb) {
  if (pb.layer_count < 1) throw std::invalid_argument("design: layer_count must be >= 1");
  if (!(pb.omega > 0.0)) throw std::invalid_argument("design: omega must be positive");
  if (pb.T < 0) throw std::invalid_argument("design: T must be >= 0");
  if (!pb.lower.empty() && pb.lower.size() != pb.dim())
    throw std::invalid_argument("design: lower bounds must have one entry per parameter");
  if (!pb.upper.empty() && pb.upper.size() != pb.dim())
    throw std::invalid_argument("design: upper bounds must have one entry per parameter");
}

}  // namespace detail

// Clamp to the box, then nudge lambda up if strong convexity would fail.
inline Eigen::VectorXd project_params(const DesignProblem& pb, Eigen::VectorXd x) {
  constexpr double eps0 = 1e-3;
  for (int k = 0; k < x.size(); ++k)
    x[k] = std::clamp(x[k], pb.lo(static_cast<size_t>(k)), pb.hi(static_cast<size_t>(k)));
  for (int k = 0; k + 2 < x.size(); k += 3) {
    const double lambda = x[k], mu = x[k + 1];
    if (3.0 * lambda + 2.0 * mu <= eps0) x[k] = (eps0 - 2.0 * mu) / 3.0 + eps0;
  }
  return x;
}

namespace detail {

inline double weighted_square_sum(const EscTable& table, const ModeWeights& weights) {
  double j = 0.0;
  for (const EscRow& row : table.rows)
    for (ModeKind out : {ModeKind::L, ModeKind::M, ModeKind::N})
      for (ModeKind in : {ModeKind::L, ModeKind::M, ModeKind::N})
        j += weights.at(out, in) * std::norm(row.entry(out, in));
  return j;
}

}  // namespace detail

inline double objective(const DesignProblem& pb, const std::vector<Material>& params) {
  detail::check_problem(pb);
  if (params.size() != static_cast<size_t>(pb.layer_count))
    throw std::invalid_argument("design: expected one material per layer");
  const LayerStack stack = make_stack(pb.background, params, pb.stack_radii());
  return detail::weighted_square_sum(esc_table(stack, pb.omega, pb.T), pb.weights);
}

// Same weighted sum on the uncoated cavity with the same core radius.
inline double bare_reference(const DesignProblem& pb) {
  detail::check_problem(pb);
  const LayerStack stack = make_stack(pb.background, {}, {pb.stack_radii().back()});
  return detail::weighted_square_sum(esc_table(stack, pb.omega, pb.T), pb.weights);
}

inline Eigen::VectorXd fd_gradient(const DesignProblem& pb, const std::vector<Material>& params,
                                   double h = 1e-5, std::vector<std::string>* notes = nullptr) {
  detail::check_problem(pb);
  const Eigen::VectorXd x = detail::to_flat(params);
  Eigen::VectorXd g(x.size());
  for (int k = 0; k < x.size(); ++k) {
    const size_t i = static_cast<size_t>(k);
    double hk = h * std::max(std::abs(x[k]), 1e-2);
    const double room_lo = x[k] - pb.lo(i), room_hi = pb.hi(i) - x[k];
    const double room = std::min(room_lo, room_hi);
    if (room <= 0.0) {
      // at the boundary: one-sided difference into the feasible side
      const double side = room_lo <= 0.0 ? std::min(hk, room_hi) : -std::min(hk, room_lo);
      if (side == 0.0) throw std::invalid_argument("fd_gradient: degenerate bounds");
      Eigen::VectorXd xp = x;
      xp[k] += side;
      g[k] = (objective(pb, detail::from_flat(xp)) - objective(pb, params)) / side;
      if (notes) notes->push_back("one-sided difference at parameter " + std::to_string(k));
      continue;
    }
    if (hk > room) {
      hk = room;
      if (notes) notes->push_back("step shrunk at parameter " + std::to_string(k));
    }
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += hk;
    xm[k] -= hk;
    g[k] = (objective(pb, detail::from_flat(xp)) - objective(pb, detail::from_flat(xm))) /
           (2.0 * hk);
  }
  return g;
}

inline DesignResult optimize(const DesignProblem& pb, const std::vector<Material>& init,
                             int max_iters = 200, double tol = 1e-8) {
  detail::check_problem(pb);
  Eigen::VectorXd x = project_params(pb, detail::to_flat(init));
  DesignResult result;
  result.status = OptStatus::max_iters;
  double f = objective(pb, detail::from_flat(x));
  result.objective_trace.push_back(f);
  double alpha = 1.0;

  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::VectorXd g = fd_gradient(pb, detail::from_flat(x));
    if (g.norm() < tol) {
      result.status = OptStatus::converged;
      break;
    }
    double a = std::min(alpha * 2.0, 1e3 / std::max(g.norm(), 1e-12));
    bool accepted = false;
    Eigen::VectorXd xn;
    double fn = f;
    for (int bt = 0; bt < 48; ++bt) {
      xn = project_params(pb, x - a * g);
      const Eigen::VectorXd s = xn - x;
      if (s.norm() == 0.0) {
        a *= 0.5;
        continue;
      }
      fn = objective(pb, detail::from_flat(xn));
      if (fn <= f + 1e-4 * g.dot(s)) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      result.status = OptStatus::stalled;
      break;
    }
    const double step = (xn - x).norm();
    alpha = a;
    x = xn;
    f = fn;
    result.objective_trace.push_back(f);
    if (step < tol * (1.0 + x.norm())) {
      result.status = OptStatus::converged;
      break;
    }
    const size_t len = result.objective_trace.size();
    if (len > 10) {
      const double past = result.objective_trace[len - 11];
      if (past - f < tol * std::max(1.0, past)) {
        result.status = OptStatus::converged;
        break;
      }
    }
  }

  result.materials = detail::from_flat(x);
  result.final_objective = f;
  return result;
}

// Independent seeded starts, uniform inside the box; results come back in
// start order so the run is deterministic regardless of scheduling.
inline std::vector<DesignResult> multistart(const DesignProblem& pb, int count,
                                            std::uint64_t seed, int max_iters = 200,
                                            double tol = 1e-8) {
  detail::check_problem(pb);
  if (count < 1) throw std::invalid_argument("multistart: count must be >= 1");
  std::vector<std::vector<Material>> starts;
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    Eigen::VectorXd x(pb.dim());
    for (size_t k = 0; k < pb.dim(); ++k) {
      std::uniform_real_distribution<double> uni(pb.lo(k), pb.hi(k));
      x[static_cast<int>(k)] = uni(rng);
    }
    starts.push_back(detail::from_flat(project_params(pb, x)));
  }

  std::vector<DesignResult> results(static_cast<size_t>(count));
  const auto run = [&](int i) {
    DesignResult r = optimize(pb, starts[static_cast<size_t>(i)], max_iters, tol);
    r.seed = seed + static_cast<std::uint64_t>(i);
    return r;
  };
  if (count >= 4) {
    std::vector<std::future<DesignResult>> futs;
    for (int i = 0; i < count; ++i)
      futs.push_back(std::async(std::launch::async, run, i));
    for (int i = 0; i < count; ++i) results[static_cast<size_t>(i)] = futs[static_cast<size_t>(i)].get();
  } else {
    for (int i = 0; i < count; ++i) results[static_cast<size_t>(i)] = run(i);
  }
  return results;
}

inline const DesignResult& best_result(const std::vector<DesignResult>& results) {
  if (results.empty()) throw std::invalid_argument("best_result: empty result set");
  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i)
    if (results[i].final_objective < results[best].final_objective) best = i;
  return results[best];
}

}  // namespace escloak
