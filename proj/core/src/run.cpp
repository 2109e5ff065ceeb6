#include "finsler/run.hpp"

#include "finsler/experiments.hpp"
#include "finsler/mollifier.hpp"
#include "finsler/parallel.hpp"
#include "finsler/sphere_bundle.hpp"
#include "finsler/spray.hpp"

#include <json.hpp>

#include <unistd.h>

#include <cfloat>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace finsler {
namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string vec_str(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + "]";
}

ConvergenceTable run_norm(const RunConfig& c, std::size_t& nodes) {
  const FinslerMetric metric = build_metric(c);
  const Domain domain = build_domain(c);
  const FiberQuadrature rule = build_fiber_rule(c);
  const ScalarField u = fields::by_name(c.field, metric.dim());
  nodes = domain.node_count();
  const SobolevTerms t = sobolev_terms(metric, u, c.sobolev, domain, rule);
  const double lpm = lp_norm_M(metric, u, c.sobolev.p, domain, rule);
  ConvergenceTable table;
  table.columns = {"k", "p", "lp_sm", "grad_lp_sm", "h1p", "lp_m"};
  std::vector<double> row{static_cast<double>(c.sobolev.k), c.sobolev.p, t.lp, t.grad_lp, t.total, lpm};
  if (metric.reversible() && c.sobolev.k == 1 && c.sobolev.p == 2.0) {
    const double gs = gs_norm(metric, u, domain, rule);
    table.columns.insert(table.columns.end(), {"gs", "ratio"});
    row.insert(row.end(), {gs, gs > 0.0 ? t.total / gs : 0.0});
  } else {
    table.set_meta("gs", metric.reversible() ? "not computed (needs k=1, p=2)" : "refused (irreversible metric)");
  }
  table.add_row(std::move(row));
  table.set_meta("metric", metric.describe());
  table.set_meta("field", u.name);
  table.set_meta("spec", c.sobolev.describe());
  table.set_meta("domain", domain.describe());
  table.set_meta("fiber", rule.describe());
  return table;
}

ConvergenceTable run_density(const RunConfig& c, std::size_t& nodes) {
  const FinslerMetric metric = build_metric(c);
  const Domain domain = build_domain(c);
  const FiberQuadrature rule = build_fiber_rule(c);
  const ScalarField u = fields::by_name(c.field, metric.dim());
  nodes = domain.node_count();
  const Point x0(c.density_center.value_or(Vec::Zero(metric.dim())));
  return density_experiment(metric, u, c.sobolev.p, c.density_jmax, c.distance, rule, domain, x0);
}

ConvergenceTable run_mollify(const RunConfig& c, std::size_t& nodes) {
  const FinslerMetric metric = build_metric(c);
  const Domain domain = build_domain(c);
  const FiberQuadrature rule = build_fiber_rule(c);
  const ScalarField u = fields::by_name(c.field, metric.dim());
  nodes = domain.node_count();
  return mollification_convergence(metric, u, c.sobolev.p, c.mollify_eps, domain, rule);
}

ConvergenceTable run_geodesic(const RunConfig& c, std::size_t& nodes) {
  const FinslerMetric metric = build_metric(c);
  const int n = metric.dim();
  Vec v0 = Vec::Zero(n);
  v0[0] = 1.0;
  const TangentVector start{Point(c.geodesic_x.value_or(Vec::Zero(n))), c.geodesic_v.value_or(v0)};
  const Curve curve = integrate_geodesic(metric, start, c.geodesic_T, c.geodesic_steps);
  nodes = curve.samples.size();
  ConvergenceTable table;
  table.columns = {"t"};
  for (int k = 0; k < n; ++k) table.columns.push_back("x" + std::to_string(k + 1));
  for (int k = 0; k < n; ++k) table.columns.push_back("v" + std::to_string(k + 1));
  table.columns.push_back("F");
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    const bool last = i + 1 == curve.samples.size();
    if (i % static_cast<std::size_t>(c.geodesic_stride) != 0 && !last) continue;
    const auto& s = curve.samples[i];
    std::vector<double> row{s.t};
    for (int k = 0; k < n; ++k) row.push_back(s.point[k]);
    for (int k = 0; k < n; ++k) row.push_back(s.velocity[k]);
    row.push_back(metric.F(s.point, s.velocity));
    table.add_row(std::move(row));
  }
  table.set_meta("metric", metric.describe());
  table.set_meta("integrator", "rk4(steps=" + std::to_string(c.geodesic_steps) + ")");
  table.set_meta("length", fmt(curve_length(metric, curve)));
  table.set_meta("speed_drift", fmt(speed_drift(metric, curve)));
  table.set_meta("truncated", curve.truncated ? "true" : "false");
  return table;
}

ConvergenceTable run_fiber_decay(const RunConfig& c, std::size_t& nodes) {
  const ShrinkingFiberModel model;
  ConvergenceTable table;
  table.columns = {"L", "sm_integral", "m_integral"};
  std::string stry;
  for (double L : c.fiber_decay_L) {
    const FiberDecayResult r = fiber_decay_example(L, model);
    nodes = std::max(nodes, model.strip(L).node_count());
    table.add_row({r.L, r.sm_integral, r.m_integral});
    stry += (stry.empty() ? "" : ";") + fmt(L) + ":" + fmt(model.stry_constant(L));
  }
  table.set_meta("model", "fiber radius exp(-x^2) over strip [-L,L]x[0,1]");
  table.set_meta("grid", std::to_string(model.cells_per_unit_x) + " cells/unit x " + std::to_string(model.cells_y));
  table.set_meta("stry_constant", stry);
  return table;
}

ConvergenceTable run_sharpness(const RunConfig& c, std::size_t& nodes) {
  nodes = static_cast<std::size_t>(c.sharpness_resolution) * static_cast<std::size_t>(c.sharpness_resolution / 2);
  return sharpness_experiment(c.sharpness_p, c.sharpness_widths, c.sharpness_resolution);
}

ConvergenceTable run_dirichlet(const RunConfig& c, std::size_t& nodes) {
  const ScalarField f = fields::by_name(c.dirichlet_f, 2);
  const DirichletSolution sol = dirichlet_solve_torus(f, c.dirichlet_n, 2);
  nodes = sol.domain.node_count();
  ConvergenceTable t = dirichlet_approximation(sol, c.dirichlet_eps);
  t.set_meta("source", f.name);
  t.set_meta("weak_form_defect", fmt(dirichlet_weak_form_defect(sol)));
  return t;
}

ConvergenceTable run_check(const RunConfig& c, std::size_t& nodes) {
  const FinslerMetric metric = build_metric(c);
  const int n = metric.dim();
  std::mt19937_64 rng(12345);
  const double reach = metric.kind() == MetricKind::Funk ? 0.9 : 2.0;
  std::uniform_real_distribution<double> coord(-reach, reach), dir(-1.0, 1.0);
  std::vector<TangentVector> samples;
  std::vector<Point> points;
  while (static_cast<int>(samples.size()) < c.check_samples) {
    Vec x(n), y(n);
    for (int k = 0; k < n; ++k) x[k] = coord(rng);
    for (int k = 0; k < n; ++k) y[k] = dir(rng);
    if (!metric.in_domain(Point(x)) || x.norm() > reach || y.norm() < 1e-3) continue;
    samples.push_back({Point(x), y});
    points.emplace_back(x);
  }
  nodes = samples.size();
  const std::vector<double> lambdas{0.5, 2.0, 10.0};
  const HomogeneityReport h = check_homogeneity(metric, samples, lambdas);
  const TensorReport g = check_fundamental_tensor(metric, samples);
  const double defect = reversibility_defect(metric, points);
  const Vec lo = Vec::Constant(n, metric.kind() == MetricKind::Funk ? -0.5 : 0.0);
  const Vec hi = Vec::Constant(n, metric.kind() == MetricKind::Funk ? 0.5 : 1.0);
  const double R = stry_constant(metric, Domain::box(lo, hi, 8), 100);
  ConvergenceTable table;
  table.columns = {"check", "value", "limit", "pass"};
  table.add_row({1.0, h.max_relative_deviation, 1e-12, h.max_relative_deviation <= 1e-12 ? 1.0 : 0.0});
  table.add_row({2.0, g.min_eigenvalue, 0.0, g.min_eigenvalue > 0.0 ? 1.0 : 0.0});
  table.add_row({3.0, g.max_asymmetry, 1e-12, g.max_asymmetry <= 1e-12 ? 1.0 : 0.0});
  const bool rev_ok = metric.reversible() ? defect <= 1e-12 : defect > 0.0;
  table.add_row({4.0, defect, 0.0, rev_ok ? 1.0 : 0.0});
  table.add_row({5.0, R, 0.0, R > 0.0 ? 1.0 : 0.0});
  table.set_meta("metric", metric.describe());
  table.set_meta("checks", "1=homogeneity 2=min_eig_g 3=g_asymmetry 4=reversibility_defect 5=stry_constant");
  table.set_meta("stry_domain", vec_str(lo) + "x" + vec_str(hi));
  return table;
}

ConvergenceTable dispatch(const RunConfig& c, std::size_t& nodes) {
  const std::string& e = c.experiment;
  if (e == "norm") return run_norm(c, nodes);
  if (e == "density") return run_density(c, nodes);
  if (e == "mollify") return run_mollify(c, nodes);
  if (e == "geodesic") return run_geodesic(c, nodes);
  if (e == "fiber-decay") return run_fiber_decay(c, nodes);
  if (e == "sharpness") return run_sharpness(c, nodes);
  if (e == "dirichlet") return run_dirichlet(c, nodes);
  if (e == "check") return run_check(c, nodes);
  throw ArgumentError("unknown experiment '" + e + "'");
}

std::string summary_line(const RunReport& r, const RunConfig& c) {
  const auto& t = r.table;
  auto pick = [&](const char* key, const char* fallback) {
    const std::string v = t.meta(key);
    return v.empty() ? std::string(fallback) : v;
  };
  std::string grid = t.meta("domain");
  if (grid.empty()) grid = t.meta("grid");
  if (grid.empty()) grid = "none";
  return "# experiment=" + c.experiment + ", metric=" + pick("metric", "none") + ", grid=" + grid +
         ", provider=" + pick("provider", "none");
}

}  // namespace

RunReport execute(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.table = dispatch(config, r.nodes);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double vmax = 0.0;
  for (const auto& row : r.table.rows) {
    for (double v : row) {
      if (std::isfinite(v)) vmax = std::max(vmax, std::abs(v));
    }
  }
  r.quadrature_floor = DBL_EPSILON * std::sqrt(static_cast<double>(std::max<std::size_t>(r.nodes, 1))) * vmax;
  return r;
}

std::string render_csv(const RunReport& report, const RunConfig& config) {
  std::string out = summary_line(report, config) + "\n";
  for (const auto& [k, v] : report.table.metadata) out += "# " + k + "=" + v + "\n";
  for (const auto& [k, v] : config.echo) out += "# config: " + k + " = " + v + "\n";
  const auto& cols = report.table.columns;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& row : report.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + fmt(row[i]);
    out += "\n";
  }
  return out;
}

std::string render_json(const RunReport& report, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["experiment"] = config.experiment;
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.echo) echo[k] = v;
  j["config"] = echo;
  j["wall_seconds"] = report.wall_seconds;
  j["threads"] = thread_count();
  j["nodes"] = report.nodes;
  j["quadrature_floor"] = report.quadrature_floor;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.table.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = report.table.columns;
  j["rows"] = report.table.rows.size();
  return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename output into '" + path + "'");
  }
}

int run(const std::string& config_text, const std::string& out_path, std::ostream& log) {
  RunConfig config;
  try {
    config = parse_config(config_text);
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  }
  std::string path = out_path.empty() ? config.output : out_path;
  if (path.empty()) path = config.experiment + ".csv";
  // Metric and domain construction failures are configuration problems.
  try {
    if (config.experiment == "norm" || config.experiment == "density" || config.experiment == "mollify" ||
        config.experiment == "geodesic" || config.experiment == "check") {
      (void)build_metric(config);
      (void)fields::by_name(config.field, config.metric.dim);
    }
    if (config.experiment == "norm" || config.experiment == "density" || config.experiment == "mollify") {
      (void)build_domain(config);
      (void)build_fiber_rule(config);
    }
    if (config.experiment == "density") config.distance.validate();
    // eps below the grid resolution is refused before any work is done
    if (config.experiment == "mollify") {
      const Domain domain = build_domain(config);
      for (double eps : config.mollify_eps) (void)discrete_kernel_mass(MollifierSpec::make(domain.dim(), eps), domain);
    }
    if (config.experiment == "dirichlet") {
      const Domain torus = Domain::torus(Vec::Constant(2, 2.0 * std::numbers::pi), config.dirichlet_n);
      for (double eps : config.dirichlet_eps) (void)discrete_kernel_mass(MollifierSpec::make(2, eps), torus);
    }
  } catch (const Error& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  RunReport report;
  try {
    report = execute(config);
  } catch (const Error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  try {
    write_atomic(path, render_csv(report, config));
    write_atomic(path + ".json", render_json(report, config));
  } catch (const Error& e) {
    log << e.what() << "\n";
    return kExitNumerical;
  }
  if (config.experiment == "check") {
    for (double pass : report.table.column("pass")) {
      if (pass != 1.0) {
        log << "metric check failed; see " << path << "\n";
        return kExitNumerical;
      }
    }
  }
  log << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace finsler
