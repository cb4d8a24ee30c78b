#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "escloak/config.hpp"
#include "escloak/design.hpp"
#include "escloak/farfield.hpp"
#include "escloak/harmonics.hpp"
#include "escloak/medium.hpp"
#include "escloak/scattering.hpp"
#include "escloak/transform.hpp"

using nlohmann::json;
using namespace escloak;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Logger {
  int level = 1;  // 0 off, 1 warn, 2 info, 3 debug

  void configure(bool quiet) {
    if (const char* env = std::getenv("ESCLOAK_LOG")) {
      const std::string v = env;
      if (v == "off") level = 0;
      else if (v == "warn") level = 1;
      else if (v == "info") level = 2;
      else if (v == "debug") level = 3;
    }
    if (quiet) level = 0;
  }
  void warn(const std::string& s) const {
    if (level >= 1) std::cerr << "warning: " << s << "\n";
  }
  void info(const std::string& s) const {
    if (level >= 2) std::cerr << "info: " << s << "\n";
  }
  void debug(const std::string& s) const {
    if (level >= 3) std::cerr << "debug: " << s << "\n";
  }
};

Logger logger;

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw IoError("i/o error: cannot write output file '" + path + "'");
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

struct CommonOpts {
  std::string config;
  std::string out;
  std::string format = "csv";
  int jobs = 0;
  bool quiet = false;
  double omega = 0.0;             // 0 = not set
  std::vector<double> omega_range;  // lo hi n
  bool log_grid = false;
  int order = -1;  // -1 = not set
  std::uint64_t seed = 0;
  bool seed_set = false;
};

// ---------------------------------------------------------------------------
// config helpers

ConfigValue load_root(const CommonOpts& opts) {
  if (opts.config.empty()) throw ConfigError("config error: missing field '--config'");
  return load_config_file(opts.config);
}

double pick_omega(const CommonOpts& opts, const ConfigValue& root, double fallback = 1.0) {
  if (opts.omega != 0.0) {
    if (!(opts.omega > 0.0)) throw ConfigError("config error: field '--omega' must be positive");
    return opts.omega;
  }
  if (const ConfigValue* v = root.find("omega")) {
    const double w = v->as_number("omega");
    if (!(w > 0.0)) throw ConfigError("config error: field 'omega' must be positive");
    return w;
  }
  return fallback;
}

int pick_order(const CommonOpts& opts, const ConfigValue& root, int fallback = 2) {
  int t = fallback;
  if (const ConfigValue* v = root.find("T"))
    t = static_cast<int>(v->as_number("T"));
  else if (const ConfigValue* v2 = root.find("order"))
    t = static_cast<int>(v2->as_number("order"));
  if (opts.order >= 0) t = opts.order;
  if (t < 0) throw ConfigError("config error: field 'order' must be >= 0");
  return t;
}

Eigen::Vector3d parse_vec3(const ConfigValue& v, const std::string& field) {
  const auto& a = v.as_array(field);
  if (a.size() != 3)
    throw ConfigError("config error: field '" + field + "' must have 3 entries");
  return {a[0].as_number(field + "[0]"), a[1].as_number(field + "[1]"),
          a[2].as_number(field + "[2]")};
}

// Directions are normalized here; shear polarization is projected orthogonal
// to the travel direction before the expansion sees it.
IncidentWave parse_incident(const ConfigValue& root) {
  IncidentWave wave;
  wave.d = Eigen::Vector3d(0.0, 0.0, 1.0);
  wave.q = Eigen::Vector3d(1.0, 0.0, 0.0);
  const ConfigValue* inc = root.find("incident");
  if (!inc) return wave;
  inc->as_table("incident");
  if (const ConfigValue* k = inc->find("kind")) {
    const std::string v = k->as_string("incident.kind");
    if (v == "pressure")
      wave.kind = WaveType::pressure;
    else if (v == "shear")
      wave.kind = WaveType::shear;
    else
      throw ConfigError("config error: field 'incident.kind' must be 'pressure' or 'shear'");
  }
  if (const ConfigValue* d = inc->find("d")) {
    const Eigen::Vector3d raw = parse_vec3(*d, "incident.d");
    if (raw.norm() < 1e-12)
      throw ConfigError("config error: field 'incident.d' must be a nonzero vector");
    wave.d = raw.normalized();
  }
  if (wave.kind == WaveType::shear) {
    Eigen::Vector3d raw = wave.q;
    if (const ConfigValue* q = inc->find("q")) raw = parse_vec3(*q, "incident.q");
    const Eigen::Vector3d perp = (wave.d.cross(raw)).cross(wave.d);
    if (perp.norm() < 1e-9)
      throw ConfigError(
          "config error: field 'incident.q' must not be parallel to the incidence direction");
    wave.q = perp.normalized();
  }
  return wave;
}

std::vector<double> omega_grid(const CommonOpts& opts, const ConfigValue& root) {
  double lo = 0.0, hi = 0.0;
  int count = 0;
  bool log_spaced = opts.log_grid;
  if (opts.omega_range.size() == 3) {
    lo = opts.omega_range[0];
    hi = opts.omega_range[1];
    count = static_cast<int>(opts.omega_range[2]);
  } else if (const ConfigValue* v = root.find("omega_range")) {
    const auto& a = v->as_array("omega_range");
    if (a.size() != 3)
      throw ConfigError("config error: field 'omega_range' must be [lo, hi, count]");
    lo = a[0].as_number("omega_range[0]");
    hi = a[1].as_number("omega_range[1]");
    count = static_cast<int>(a[2].as_number("omega_range[2]"));
    if (const ConfigValue* lg = root.find("log")) log_spaced = lg->as_bool("log");
  } else {
    throw ConfigError("config error: missing field 'omega_range' (or --omega-range LO HI N)");
  }
  if (!(lo > 0.0) || !(hi >= lo))
    throw ConfigError("config error: field 'omega_range' must satisfy 0 < lo <= hi");
  if (count < 1) throw ConfigError("config error: field 'omega_range' count must be >= 1");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.push_back(log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return grid;
}

template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, 16);
  if (jobs == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::future<void>> workers;
  for (int w = 0; w < std::min(jobs, count); ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    }));
  for (auto& f : workers) f.get();
}

// ---------------------------------------------------------------------------
// emission

const char* pair_name(ModeKind out, ModeKind in) {
  const auto c = [](ModeKind k) { return k == ModeKind::L ? 'L' : k == ModeKind::M ? 'M' : 'N'; };
  static thread_local char buf[3];
  buf[0] = c(out);
  buf[1] = c(in);
  buf[2] = '\0';
  return buf;
}

const std::vector<std::pair<ModeKind, ModeKind>> kEscPairs = {
    {ModeKind::L, ModeKind::L}, {ModeKind::N, ModeKind::L}, {ModeKind::L, ModeKind::N},
    {ModeKind::N, ModeKind::N}, {ModeKind::M, ModeKind::M}};

void emit_esc_rows(std::ostream& os, const EscTable& table) {
  for (const EscRow& row : table.rows) {
    for (const auto& [out, in] : kEscPairs) {
      if (row.n == 0 && !(out == ModeKind::L && in == ModeKind::L)) continue;
      const cplx w = row.entry(out, in);
      os << fmt(table.omega) << ',' << row.n << ',' << pair_name(out, in) << ','
         << fmt(w.real()) << ',' << fmt(w.imag()) << ',' << fmt(std::abs(w)) << '\n';
    }
  }
}

json esc_json(const EscTable& table) {
  json rows = json::array();
  for (const EscRow& row : table.rows) {
    for (const auto& [out, in] : kEscPairs) {
      if (row.n == 0 && !(out == ModeKind::L && in == ModeKind::L)) continue;
      const cplx w = row.entry(out, in);
      rows.push_back({{"n", row.n},
                      {"pair", pair_name(out, in)},
                      {"re", w.real()},
                      {"im", w.imag()},
                      {"abs", std::abs(w)}});
    }
  }
  return {{"omega", table.omega},
          {"core_radius", table.core_radius},
          {"order", table.order()},
          {"rows", rows}};
}

json material_json(const Material& m) {
  return {{"lambda", m.lambda}, {"mu", m.mu}, {"rho", m.rho}};
}

// ---------------------------------------------------------------------------
// subcommands

int run_compute(const CommonOpts& opts) {
  const ConfigValue root = load_root(opts);
  const LayerStack stack = parse_stack(root);
  const double omega = pick_omega(opts, root);
  const int T = pick_order(opts, root);
  logger.info("compute: omega = " + fmt(omega) + ", order = " + std::to_string(T));
  const EscTable table = esc_table(stack, omega, T);
  Output out(opts.out);
  if (opts.format == "json") {
    out.stream() << esc_json(table).dump(2) << '\n';
  } else {
    out.stream() << "omega,n,pair,re,im,abs\n";
    emit_esc_rows(out.stream(), table);
  }
  return 0;
}

int run_sweep(const CommonOpts& opts) {
  const ConfigValue root = load_root(opts);
  const LayerStack stack = parse_stack(root);
  const int T = pick_order(opts, root);
  if (T < 1) throw ConfigError("config error: field 'order' must be >= 1 for sweep");
  const IncidentWave wave = parse_incident(root);
  const std::vector<double> grid = omega_grid(opts, root);
  const LayerStack bare = make_stack(stack.background, {}, {stack.core_radius()});
  logger.info("sweep: " + std::to_string(grid.size()) + " frequencies, order = " +
              std::to_string(T));

  struct Point {
    EscTable table;
    double strength = 0.0;
    double ratio = 0.0;
  };
  std::vector<Point> points(grid.size());
  parallel_for(static_cast<int>(grid.size()), opts.jobs, [&](int i) {
    const double omega = grid[static_cast<size_t>(i)];
    Point p;
    p.table = esc_table(stack, omega, T);
    const WaveNumbers w = wave_numbers(stack.background, omega);
    const IncidentCoeffs inc = plane_wave_coeffs(wave, T, w.kappaP, w.kappaS);
    p.strength = total_scattering_strength(gamma_coeffs(p.table, inc), stack.background, omega);
    const double ref = total_scattering_strength(
        gamma_coeffs(esc_table(bare, omega, T), inc), stack.background, omega);
    p.ratio = ref > 0.0 ? p.strength / ref : 0.0;
    points[static_cast<size_t>(i)] = std::move(p);
  });

  if (opts.format == "json") {
    json tables = json::array(), summary = json::array();
    for (size_t i = 0; i < grid.size(); ++i) {
      tables.push_back(esc_json(points[i].table));
      summary.push_back({{"omega", grid[i]},
                         {"strength", points[i].strength},
                         {"strength_bare_ratio", points[i].ratio}});
    }
    Output out(opts.out);
    out.stream() << json{{"summary", summary}, {"tables", tables}}.dump(2) << '\n';
    return 0;
  }

  const auto emit_summary = [&](std::ostream& os) {
    os << "omega,strength,strength_bare_ratio\n";
    for (size_t i = 0; i < grid.size(); ++i)
      os << fmt(grid[i]) << ',' << fmt(points[i].strength) << ',' << fmt(points[i].ratio)
         << '\n';
  };
  if (opts.out.empty()) {
    emit_summary(std::cout);
    return 0;
  }
  Output tables_out(opts.out);
  tables_out.stream() << "omega,n,pair,re,im,abs\n";
  for (const Point& p : points) emit_esc_rows(tables_out.stream(), p.table);
  Output summary_out(opts.out + ".summary.csv");
  emit_summary(summary_out.stream());
  logger.info("sweep: summary written to " + opts.out + ".summary.csv");
  return 0;
}

ModeWeights parse_mode_weights(const ConfigValue& root) {
  ModeWeights w;
  const ConfigValue* mw = root.find("mode_weights");
  if (!mw) return w;
  mw->as_table("mode_weights");
  w = ModeWeights::zero();  // a present table lists exactly the wanted terms
  const auto kind_of = [](char c, const std::string& field) {
    if (c == 'L') return ModeKind::L;
    if (c == 'M') return ModeKind::M;
    if (c == 'N') return ModeKind::N;
    throw ConfigError("config error: field '" + field + "' is not a mode pair");
  };
  for (const auto& [key, value] : mw->tab) {
    const std::string field = "mode_weights." + key;
    if (key.size() != 2) throw ConfigError("config error: field '" + field + "' is not a mode pair");
    w.at(kind_of(key[0], field), kind_of(key[1], field)) = value.as_number(field);
  }
  return w;
}

std::vector<double> parse_bound(const ConfigValue& bounds, const std::string& key, size_t dim) {
  const ConfigValue* v = bounds.find(key);
  if (!v) return {};
  const std::string field = "bounds." + key;
  std::vector<double> out;
  if (v->kind == ConfigValue::Kind::number) {
    out.assign(dim, v->num);
  } else {
    for (const ConfigValue& e : v->as_array(field)) out.push_back(e.as_number(field + "[]"));
    if (out.size() != dim)
      throw ConfigError("config error: field '" + field + "' must have one entry per parameter");
  }
  return out;
}

int run_optimize(const CommonOpts& opts) {
  if (opts.format != "csv" && opts.format != "json")
    throw ConfigError("config error: field '--format' must be csv or json");
  const ConfigValue root = load_root(opts);

  DesignProblem pb;
  pb.background = root.has("background")
                      ? parse_material(root.at("background", ""), "background")
                      : Material{1.0, 1.0, 1.0};
  if (const ConfigValue* radii = root.find("radii")) {
    for (const ConfigValue& r : radii->as_array("radii"))
      pb.radii.push_back(r.as_number("radii[]"));
    if (pb.radii.size() < 2)
      throw ConfigError("config error: field 'radii' must have at least 2 entries");
    pb.layer_count = static_cast<int>(pb.radii.size()) - 1;
  }
  if (const ConfigValue* lc = root.find("layer_count")) {
    const int n = static_cast<int>(lc->as_number("layer_count"));
    if (!pb.radii.empty() && n != pb.layer_count)
      throw ConfigError("config error: field 'layer_count' conflicts with 'radii'");
    pb.layer_count = n;
  }
  if (pb.layer_count < 1)
    throw ConfigError("config error: field 'layer_count' must be >= 1");
  pb.omega = pick_omega(opts, root);
  pb.T = pick_order(opts, root);
  pb.weights = parse_mode_weights(root);
  if (const ConfigValue* bounds = root.find("bounds")) {
    bounds->as_table("bounds");
    pb.lower = parse_bound(*bounds, "lo", pb.dim());
    pb.upper = parse_bound(*bounds, "hi", pb.dim());
  }

  std::uint64_t seed = 2026;
  if (const ConfigValue* s = root.find("seed")) seed = static_cast<std::uint64_t>(s->as_number("seed"));
  if (opts.seed_set) seed = opts.seed;
  int starts = 16;
  if (const ConfigValue* s = root.find("starts"))
    starts = static_cast<int>(s->as_number("starts"));
  int max_iters = 200;
  if (const ConfigValue* v = root.find("max_iters"))
    max_iters = static_cast<int>(v->as_number("max_iters"));
  double tol = 1e-8;
  if (const ConfigValue* v = root.find("tol")) tol = v->as_number("tol");

  logger.info("optimize: " + std::to_string(starts) + " starts, seed " + std::to_string(seed));
  std::vector<DesignResult> runs;
  if (const ConfigValue* init = root.find("init")) {
    std::vector<Material> mats;
    size_t idx = 0;
    for (const ConfigValue& m : init->as_array("init"))
      mats.push_back(parse_material(m, "init[" + std::to_string(idx++) + "]"));
    if (mats.size() != static_cast<size_t>(pb.layer_count))
      throw ConfigError("config error: field 'init' must have one material per layer");
    runs.push_back(optimize(pb, mats, max_iters, tol));
  } else {
    runs = multistart(pb, starts, seed, max_iters, tol);
  }

  const double bare = bare_reference(pb);
  const DesignResult& best = best_result(runs);
  const auto status_name = [](OptStatus s) {
    return s == OptStatus::converged ? "converged"
           : s == OptStatus::max_iters ? "max_iters"
                                       : "stalled";
  };
  const auto result_json = [&](const DesignResult& r, bool with_trace) {
    json mats = json::array();
    for (const Material& m : r.materials) mats.push_back(material_json(m));
    json doc = {{"materials", mats},
                {"final_objective", r.final_objective},
                {"status", status_name(r.status)},
                {"seed", r.seed},
                {"iterations", r.objective_trace.size()}};
    if (with_trace) doc["trace"] = r.objective_trace;
    return doc;
  };
  json all = json::array();
  for (const DesignResult& r : runs) all.push_back(result_json(r, false));
  const json doc = {{"seed", seed},
                    {"starts", static_cast<int>(runs.size())},
                    {"omega", pb.omega},
                    {"order", pb.T},
                    {"bare_objective", bare},
                    {"best", result_json(best, true)},
                    {"best_bare_ratio", bare > 0.0 ? best.final_objective / bare : 0.0},
                    {"runs", all}};
  Output out(opts.out);
  out.stream() << doc.dump(2) << '\n';
  return 0;
}

int run_farfield(const CommonOpts& opts) {
  const ConfigValue root = load_root(opts);
  const LayerStack stack = parse_stack(root);
  const double omega = pick_omega(opts, root);
  const int K = std::max(1, pick_order(opts, root));
  const IncidentWave wave = parse_incident(root);
  int ntheta = 19, nphi = 36;
  if (const ConfigValue* grid = root.find("grid")) {
    grid->as_table("grid");
    if (const ConfigValue* v = grid->find("ntheta"))
      ntheta = static_cast<int>(v->as_number("grid.ntheta"));
    if (const ConfigValue* v = grid->find("nphi"))
      nphi = static_cast<int>(v->as_number("grid.nphi"));
  }
  if (ntheta < 2 || nphi < 1)
    throw ConfigError("config error: field 'grid' must have ntheta >= 2, nphi >= 1");

  const WaveNumbers w = wave_numbers(stack.background, omega);
  const GammaCoeffs gamma =
      gamma_coeffs(esc_table(stack, omega, K), plane_wave_coeffs(wave, K, w.kappaP, w.kappaS));
  logger.info("farfield: grid " + std::to_string(ntheta) + " x " + std::to_string(nphi));

  std::vector<FarFieldSample> samples(static_cast<size_t>(ntheta) * nphi);
  parallel_for(ntheta * nphi, opts.jobs, [&](int idx) {
    const int i = idx / nphi, j = idx % nphi;
    const double theta = M_PI * static_cast<double>(i) / (ntheta - 1);
    const double phi = 2.0 * M_PI * static_cast<double>(j) / nphi;
    samples[static_cast<size_t>(idx)] =
        far_field_amplitude(gamma, SphericalDirection{theta, phi}, stack.background, omega);
  });

  Output out(opts.out);
  if (opts.format == "json") {
    json arr = json::array();
    for (const FarFieldSample& s : samples) {
      const auto cvec = [](const FrameVector3& v) {
        return json{{"r", {v(0).real(), v(0).imag()}},
                    {"theta", {v(1).real(), v(1).imag()}},
                    {"phi", {v(2).real(), v(2).imag()}}};
      };
      arr.push_back({{"theta", s.direction.theta},
                     {"phi", s.direction.phi},
                     {"uP", cvec(s.uP)},
                     {"uS", cvec(s.uS)}});
    }
    out.stream() << json{{"omega", omega}, {"K", K}, {"samples", arr}}.dump(2) << '\n';
    return 0;
  }
  out.stream() << "theta,phi,re_uP_r,im_uP_r,re_uP_theta,im_uP_theta,re_uP_phi,im_uP_phi,"
                  "re_uS_r,im_uS_r,re_uS_theta,im_uS_theta,re_uS_phi,im_uS_phi\n";
  for (const FarFieldSample& s : samples) {
    out.stream() << fmt(s.direction.theta) << ',' << fmt(s.direction.phi);
    for (const FrameVector3* v : {&s.uP, &s.uS})
      for (int k = 0; k < 3; ++k)
        out.stream() << ',' << fmt((*v)(k).real()) << ',' << fmt((*v)(k).imag());
    out.stream() << '\n';
  }
  return 0;
}

int run_transform_field(const CommonOpts& opts) {
  const ConfigValue root = load_root(opts);
  RadialMap map;
  if (const ConfigValue* m = root.find("map")) {
    m->as_table("map");
    if (const ConfigValue* kind = m->find("kind")) {
      const std::string v = kind->as_string("map.kind");
      if (v == "identity") map.kind = MapKind::identity;
      else if (v == "F_eps") map.kind = MapKind::F_eps;
      else if (v == "psi_inv_eps") map.kind = MapKind::psi_inv_eps;
      else
        throw ConfigError(
            "config error: field 'map.kind' must be identity, F_eps, or psi_inv_eps");
    }
    if (const ConfigValue* e = m->find("eps")) map.eps = e->as_number("map.eps");
  }
  if (map.kind != MapKind::identity && !(map.eps > 0.0 && map.eps < 1.0))
    throw ConfigError("config error: field 'map.eps' must lie in (0, 1)");

  Material mat{1.0, 1.0, 1.0};
  if (root.has("material")) mat = parse_material(root.at("material", ""), "material");
  if (!material_valid(mat))
    throw ConfigError("config error: field 'material' violates the convexity conditions");
  const ElasticityTensor tensor = ElasticityTensor::isotropic(mat.lambda, mat.mu);

  double r_min = 0.25, r_max = 2.5;
  int nr = 9, ntheta = 5, nphi = 8;
  if (const ConfigValue* grid = root.find("grid")) {
    grid->as_table("grid");
    if (const ConfigValue* v = grid->find("r_min")) r_min = v->as_number("grid.r_min");
    if (const ConfigValue* v = grid->find("r_max")) r_max = v->as_number("grid.r_max");
    if (const ConfigValue* v = grid->find("nr")) nr = static_cast<int>(v->as_number("grid.nr"));
    if (const ConfigValue* v = grid->find("ntheta"))
      ntheta = static_cast<int>(v->as_number("grid.ntheta"));
    if (const ConfigValue* v = grid->find("nphi"))
      nphi = static_cast<int>(v->as_number("grid.nphi"));
  }
  if (!(r_min > 0.0) || !(r_max >= r_min) || nr < 1 || ntheta < 1 || nphi < 1)
    throw ConfigError("config error: field 'grid' has an empty or negative extent");

  Output out(opts.out);
  std::ostream& os = out.stream();
  os << "x,y,z,rho";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) os << ",c" << i << j << k << l;
  os << '\n';
  for (int a = 0; a < nr; ++a) {
    const double r = nr == 1 ? r_min : r_min + (r_max - r_min) * a / (nr - 1);
    for (int b = 0; b < ntheta; ++b) {
      const double theta = M_PI * (b + 0.5) / ntheta;
      for (int c = 0; c < nphi; ++c) {
        const double phi = 2.0 * M_PI * c / nphi;
        const Eigen::Vector3d x =
            r * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                std::sin(theta) * std::sin(phi), std::cos(theta));
        const TransformedPoint p = pushforward(tensor, mat.rho, map, x);
        os << fmt(p.image.x()) << ',' << fmt(p.image.y()) << ',' << fmt(p.image.z()) << ','
           << fmt(p.rho);
        for (double entry : p.tensor.c) os << ',' << fmt(entry);
        os << '\n';
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: self-contained numerical checks with fixed seeds

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

int run_verify(const CommonOpts& opts) {
  (void)opts;
  std::vector<CheckResult> checks;
  std::mt19937_64 gen(777);
  const auto uni = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  };
  const auto rel = [](cplx a, cplx b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-30);
  };
  const Material unit{1.0, 1.0, 1.0};
  const LayerStack bare = make_stack(unit, {}, {1.0});

  {
    double worst_b = 0.0, worst_res = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int L = static_cast<int>(gen() % 4);
      std::vector<Material> layers;
      for (int i = 0; i < L; ++i)
        layers.push_back(Material{uni(0.05, 3.0), uni(0.05, 3.0), uni(0.05, 3.0)});
      const LayerStack st = make_stack(unit, layers);
      const double omega = uni(0.5, 2.0);
      for (int n = 0; n <= 3; ++n) {
        for (ModeKind inc : {ModeKind::L, ModeKind::N, ModeKind::M}) {
          if (n == 0 && inc != ModeKind::L) continue;
          const ModeSolution a = solve_modes(st, omega, n, inc);
          const ModeSolution d = direct_solve_oracle(st, omega, n, inc);
          worst_res = std::max({worst_res, a.residual, d.residual});
          if (inc == ModeKind::M)
            worst_b = std::max(worst_b, rel(a.layers[0].bM, d.layers[0].bM));
          else
            worst_b = std::max({worst_b, rel(a.layers[0].bL, d.layers[0].bL),
                                n == 0 ? 0.0 : rel(a.layers[0].bN, d.layers[0].bN)});
        }
      }
    }
    checks.push_back({"transfer vs direct solve", worst_b < 1e-9,
                      "max relative difference " + fmt(worst_b)});
    checks.push_back(
        {"interface residuals", worst_res < 1e-10, "max residual " + fmt(worst_res)});
  }

  {
    const EscTable t = esc_table(bare, 1.0, 2);
    bool zeros = true;
    for (const EscRow& row : t.rows) {
      zeros = zeros && row.entry(ModeKind::M, ModeKind::L) == cplx{} &&
              row.entry(ModeKind::M, ModeKind::N) == cplx{} &&
              row.entry(ModeKind::L, ModeKind::M) == cplx{} &&
              row.entry(ModeKind::N, ModeKind::M) == cplx{};
    }
    zeros = zeros && t.rows[0].W_NN == cplx{} && t.rows[0].W_MM == cplx{} &&
            t.rows[0].W_LL != cplx{};
    checks.push_back({"structural zeros", zeros, "conversion entries exactly zero"});
  }

  {
    const LayerStack matched = make_stack(unit, {unit, unit}, {2.0, 1.5, 1.0});
    const EscTable a = esc_table(matched, 1.0, 2), b = esc_table(bare, 1.0, 2);
    double worst = 0.0;
    for (size_t r = 0; r < a.rows.size(); ++r)
      for (const auto& [o, i] : kEscPairs)
        worst = std::max(worst, std::abs(a.rows[r].entry(o, i) - b.rows[r].entry(o, i)));
    checks.push_back(
        {"background-matched stack equals bare", worst < 1e-12, "max difference " + fmt(worst)});
  }

  {
    const LayerStack st =
        make_stack(unit, {Material{2.9, 0.7, 0.9}, Material{0.5, 0.1, 2.7}}, {2.0, 1.5, 1.0});
    const EscTable a = esc_table(st.scaled(2.0), 0.5, 3), b = esc_table(st, 1.0, 3);
    double worst = 0.0;
    for (size_t r = 0; r < a.rows.size(); ++r)
      for (const auto& [o, i] : kEscPairs)
        worst = std::max(worst, rel(a.rows[r].entry(o, i), b.rows[r].entry(o, i)));
    checks.push_back({"scale/frequency identity", worst < 1e-10, "max relative " + fmt(worst)});
  }

  {
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
      const FarFieldSample s = far_field_amplitude(g, node.dir, unit, 1.0);
      quad += node.weight * (s.uP.squaredNorm() + s.uS.squaredNorm());
    }
    const double sum = total_scattering_strength(g, unit, 1.0);
    const double err = std::abs(quad - sum) / sum;
    checks.push_back({"far-field Parseval", err < 1e-8, "relative difference " + fmt(err)});
  }

  {
    const WaveNumbers w = wave_numbers(unit, 1.0);
    const Eigen::Vector3d d = Eigen::Vector3d(0.3, -0.5, 0.81).normalized();
    IncidentWave wave;
    wave.kind = WaveType::pressure;
    wave.d = d;
    const IncidentCoeffs inc = plane_wave_coeffs(wave, 12, w.kappaP, w.kappaS);
    const Eigen::Vector3d x = Eigen::Vector3d(0.1, -0.9, -0.4).normalized();
    Eigen::Vector3cd sum = Eigen::Vector3cd::Zero();
    const SphericalDirection dir = direction_of(x);
    for (int k = 0; k <= 12; ++k)
      for (int l = -k; l <= k; ++l)
        sum += inc.a_at(k, l) * frame_to_cartesian(debye_potential({ModeKind::L, k, l},
                                                                   Family::entire, 1.0, dir,
                                                                   w.kappaP, w.kappaS),
                                                   dir);
    const Eigen::Vector3cd exact =
        d.cast<cplx>() * std::exp(cplx{0.0, 1.0} * w.kappaP * d.dot(x));
    const double err = (sum - exact).cwiseAbs().maxCoeff();
    checks.push_back(
        {"plane-wave reconstruction", err < 1e-6, "max component error " + fmt(err)});
  }

  bool all = true;
  for (const CheckResult& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.detail << ")\n";
    all = all && c.pass;
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES detected\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elastic scattering coefficients of layered spherical structures"};
  app.require_subcommand(1);

  CommonOpts opts;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "stack or design configuration file (TOML/JSON)");
    sub->add_option("--out", opts.out, "output path (default stdout)");
    sub->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", opts.jobs, "worker pool size");
    sub->add_option("--omega", opts.omega, "angular frequency");
    sub->add_option("--order", opts.order, "table truncation order");
    sub->add_flag("--quiet", opts.quiet, "suppress log output");
    return sub;
  };

  CLI::App* compute = add_common(app.add_subcommand("compute", "emit one ESC table"));
  CLI::App* sweep = add_common(app.add_subcommand("sweep", "ESC tables over a frequency grid"));
  sweep->add_option("--omega-range", opts.omega_range, "LO HI N frequency grid")->expected(3);
  sweep->add_flag("--log", opts.log_grid, "log-spaced frequency grid");
  CLI::App* optimize_cmd =
      add_common(app.add_subcommand("optimize", "search for ESC-vanishing layer materials"));
  optimize_cmd->add_option("--seed", opts.seed, "multistart seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  CLI::App* farfield = add_common(
      app.add_subcommand("farfield", "far-field amplitudes on an angular grid"));
  CLI::App* transform =
      add_common(app.add_subcommand("transform-field", "push-forward material fields"));
  CLI::App* verify = add_common(app.add_subcommand("verify", "run the numerical self-checks"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  logger.configure(opts.quiet);

  const auto dispatch = [&]() -> int {
    if (compute->parsed()) return run_compute(opts);
    if (sweep->parsed()) return run_sweep(opts);
    if (optimize_cmd->parsed()) return run_optimize(opts);
    if (farfield->parsed()) return run_farfield(opts);
    if (transform->parsed()) return run_transform_field(opts);
    if (verify->parsed()) return run_verify(opts);
    return 1;
  };

  try {
    return dispatch();
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const DegenerateFrequencyError& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 2;
  } catch (const IllConditionedError& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
