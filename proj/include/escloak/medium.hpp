#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace escloak {

struct Material {
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;
};

// strong convexity: mu > 0, 3*lambda + 2*mu > 0, plus rho > 0
inline bool material_valid(const Material& m) {
  return m.mu > 0.0 && 3.0 * m.lambda + 2.0 * m.mu > 0.0 && m.rho > 0.0;
}

struct WaveNumbers {
  double kappaP = 0.0;
  double kappaS = 0.0;
  double cP = 0.0;
  double cS = 0.0;
};

inline WaveNumbers wave_numbers(const Material& mat, double omega) {
  if (!material_valid(mat))
    throw std::invalid_argument(
        "wave_numbers: material must satisfy mu > 0, 3*lambda + 2*mu > 0, rho > 0");
  if (!(omega > 0.0)) throw std::invalid_argument("wave_numbers: omega must be positive");
  const double cP = std::sqrt((mat.lambda + 2.0 * mat.mu) / mat.rho);
  const double cS = std::sqrt(mat.mu / mat.rho);
  return {omega / cP, omega / cS, cP, cS};
}

// Concentric layers around a traction-free core.  layers[0] is the outermost
// shell (ell = 1); radii r_1 > ... > r_{L+1} with the core filling |x| < r_{L+1}.
struct LayerStack {
  Material background{1.0, 1.0, 1.0};
  std::vector<Material> layers;
  std::vector<double> radii{1.0};

  int L() const { return static_cast<int>(layers.size()); }
  double outer_radius() const { return radii.front(); }
  double core_radius() const { return radii.back(); }

  const Material& material(int ell) const {
    if (ell == 0) return background;
    return layers.at(static_cast<size_t>(ell) - 1);
  }

  LayerStack scaled(double s) const {
    LayerStack out = *this;
    for (double& r : out.radii) r *= s;
    return out;
  }
};

// Evenly spaced interfaces between the default outer radius 2 and core radius 1.
inline std::vector<double> default_radii(int L) {
  if (L == 0) return {1.0};
  std::vector<double> r(static_cast<size_t>(L) + 1);
  for (int i = 0; i <= L; ++i) r[static_cast<size_t>(i)] = 2.0 - static_cast<double>(i) / L;
  return r;
}

inline LayerStack make_stack(const Material& background, const std::vector<Material>& layers,
                             std::vector<double> radii = {}) {
  LayerStack s;
  s.background = background;
  s.layers = layers;
  s.radii = radii.empty() ? default_radii(static_cast<int>(layers.size())) : std::move(radii);
  return s;
}

struct StackReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

inline StackReport validate_stack(const LayerStack& stack) {
  StackReport report;
  auto err = [&report](const std::string& msg) { report.errors.push_back(msg); };

  if (stack.radii.size() != static_cast<size_t>(stack.L()) + 1) {
    std::ostringstream os;
    os << "radii: expected " << stack.L() + 1 << " entries for " << stack.L() << " layer(s), got "
       << stack.radii.size();
    err(os.str());
    return report;
  }
  for (size_t i = 0; i < stack.radii.size(); ++i) {
    if (!(stack.radii[i] > 0.0)) {
      std::ostringstream os;
      os << "radii[" << i << "] = " << stack.radii[i] << ": radii must be positive";
      err(os.str());
    }
    if (i > 0 && !(stack.radii[i] < stack.radii[i - 1])) {
      std::ostringstream os;
      os << "radii must be strictly decreasing, but radii[" << i - 1 << "] = " << stack.radii[i - 1]
         << " <= radii[" << i << "] = " << stack.radii[i];
      err(os.str());
    }
  }
  for (int ell = 0; ell <= stack.L(); ++ell) {
    const Material& m = stack.material(ell);
    if (!material_valid(m)) {
      std::ostringstream os;
      os << (ell == 0 ? "background" : "layer") << (ell == 0 ? std::string() : " " + std::to_string(ell))
         << ": material (lambda=" << m.lambda << ", mu=" << m.mu << ", rho=" << m.rho
         << ") must satisfy mu > 0, 3*lambda + 2*mu > 0, rho > 0";
      err(os.str());
    }
  }
  if (!report.errors.empty()) return report;

  // contrast conditions between adjacent media; only advisory
  for (int ell = 1; ell <= stack.L(); ++ell) {
    const Material& a = stack.material(ell - 1);
    const Material& b = stack.material(ell);
    const double dmu = a.mu - b.mu, dl = a.lambda - b.lambda;
    if (!(dmu * dl >= 0.0) || (dmu == 0.0 && dl == 0.0)) {
      std::ostringstream os;
      os << "interface " << ell << ": Lame contrast conditions not met "
         << "((mu_" << ell - 1 << " - mu_" << ell << ")(lambda_" << ell - 1 << " - lambda_" << ell
         << ") >= 0 and not both zero)";
      report.warnings.push_back(os.str());
    }
  }
  return report;
}

inline void require_valid(const LayerStack& stack) {
  const StackReport report = validate_stack(stack);
  if (report.ok()) return;
  std::string msg = "invalid stack:";
  for (const auto& e : report.errors) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

}  // namespace escloak
