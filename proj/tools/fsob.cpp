// fsob: command-line driver for the Finsler-Sobolev toolkit.
//
// Every subcommand flag becomes a `key = value` line layered over the --config file;
// a flag replaces the file's line for the same key.

#include "finsler/parallel.hpp"
#include "finsler/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Binds an optional string flag to a config key.
struct Binder {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, std::string>> order;  // flag value slot -> key

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = values[key];
    app->add_option(flag, slot, help);
    order.emplace_back(key, key);
  }

  void collect(Overrides& out) const {
    for (const auto& [key, _] : order) {
      const auto& v = values.at(key);
      if (!v.empty()) out.emplace_back(key, v);
    }
  }
};

std::string merge(const std::string& file_text, const Overrides& overrides) {
  std::istringstream in(file_text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::string body = line.substr(0, line.find('#'));
    const auto eq = body.find('=');
    bool replaced = false;
    if (eq != std::string::npos) {
      std::string key = body.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t\r") + 1);
      for (const auto& [k, _] : overrides) replaced = replaced || k == key;
    }
    // keep line numbering stable for diagnostics
    out << (replaced ? "# (overridden) " + line : line) << "\n";
  }
  for (const auto& [k, v] : overrides) out << k << " = " << v << "\n";
  return out.str();
}

void add_metric_flags(CLI::App* app, Binder& b) {
  b.bind(app, "--metric", "metric.kind", "euclidean | conformal | randers | funk | quartic");
  b.bind(app, "--dim", "metric.dim", "dimension n in {1,2,3}");
  b.bind(app, "--b", "metric.b", "Randers one-form, e.g. 0.5,0");
  b.bind(app, "--a", "metric.a", "Randers Riemannian part, n*n entries row-major");
  b.bind(app, "--epsilon", "metric.epsilon", "quartic perturbation in [0, 0.2]");
  b.bind(app, "--lambda", "metric.lambda", "conformal exponent coefficients");
  b.bind(app, "--lambda0", "metric.lambda0", "conformal exponent offset");
  b.bind(app, "--reversed", "metric.reversed", "use F(x,-y)");
}

void add_domain_flags(CLI::App* app, Binder& b) {
  b.bind(app, "--domain", "domain.kind", "box | ball | half_ball | torus");
  b.bind(app, "--bounds", "domain.bounds", "lo,hi or lo1,hi1,lo2,hi2,...");
  b.bind(app, "--radius", "domain.radius", "ball radius");
  b.bind(app, "--res", "quad.base_resolution", "base grid cells per axis");
  b.bind(app, "--fiber-nodes", "quad.fiber_nodes", "fiber quadrature nodes");
  b.bind(app, "--field", "field", "gaussian | coordinate | step | ramp(w) | bump | sine | zero | one");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finslerian Sobolev-space numerics: norms, density, mollification, counterexamples"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_path;
  int threads = 1;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output CSV path (a .json sidecar is written next to it)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--set", sets, "extra key=value override (repeatable)");

  std::map<std::string, Binder> binders;
  std::map<CLI::App*, std::string> experiment_of;

  auto* norm = app.add_subcommand("norm", "L^p and H_1^p norms of a catalog field");
  add_metric_flags(norm, binders["norm"]);
  add_domain_flags(norm, binders["norm"]);
  binders["norm"].bind(norm, "--k", "sobolev.k", "order k in {0,1}");
  binders["norm"].bind(norm, "--p", "sobolev.p", "exponent p >= 1");
  experiment_of[norm] = "norm";

  auto* density = app.add_subcommand("density", "truncation sequence ||phi_j - phi||_{H_1^p}");
  add_metric_flags(density, binders["density"]);
  add_domain_flags(density, binders["density"]);
  binders["density"].bind(density, "--p", "sobolev.p", "exponent p >= 1");
  binders["density"].bind(density, "--jmax", "density.jmax", "largest j");
  binders["density"].bind(density, "--center", "density.center", "ball center x0");
  binders["density"].bind(density, "--tier", "distance.tier", "closed_form | grid_dijkstra | curve_descent");
  binders["density"].bind(density, "--grid-n", "distance.grid_n", "Dijkstra cells along the longest side");
  experiment_of[density] = "density";

  auto* mollify = app.add_subcommand("mollify", "mollification convergence J_eps * u -> u");
  add_metric_flags(mollify, binders["mollify"]);
  add_domain_flags(mollify, binders["mollify"]);
  binders["mollify"].bind(mollify, "--p", "sobolev.p", "exponent p >= 1");
  binders["mollify"].bind(mollify, "--eps-list", "mollify.eps_list", "decreasing eps values");
  experiment_of[mollify] = "mollify";

  auto* geodesic = app.add_subcommand("geodesic", "integrate x'' + 2G(x,x') = 0");
  add_metric_flags(geodesic, binders["geodesic"]);
  binders["geodesic"].bind(geodesic, "--x", "geodesic.x", "start point");
  binders["geodesic"].bind(geodesic, "--v", "geodesic.v", "start velocity");
  binders["geodesic"].bind(geodesic, "--T", "geodesic.T", "final time");
  binders["geodesic"].bind(geodesic, "--steps", "geodesic.steps", "RK4 steps");
  binders["geodesic"].bind(geodesic, "--stride", "geodesic.stride", "emit every stride-th sample");
  experiment_of[geodesic] = "geodesic";

  auto* counter = app.add_subcommand("counterexample", "shrinking-fiber and sharpness examples");
  counter->require_subcommand(1);
  counter->fallthrough();
  auto* decay = counter->add_subcommand("fiber-decay", "L^1(SM) vs L^1(M) on the shrinking-fiber strip");
  binders["fiber-decay"].bind(decay, "--L", "fiber_decay.L", "increasing half-widths L >= 1");
  experiment_of[decay] = "fiber-decay";
  auto* sharp = counter->add_subcommand("sharpness", "step vs C^1 ramps against 1/(2+2^{1/p'})");
  binders["sharpness"].bind(sharp, "--p", "sharpness.p", "exponent p >= 1");
  binders["sharpness"].bind(sharp, "--widths", "sharpness.widths", "increasing ramp widths in (0,1]");
  binders["sharpness"].bind(sharp, "--res", "sharpness.resolution", "cells along x^1");
  experiment_of[sharp] = "sharpness";

  auto* dirichlet = app.add_subcommand("dirichlet", "spectral Delta u = f on the flat torus, then mollify");
  binders["dirichlet"].bind(dirichlet, "--n", "dirichlet.n", "grid size (power of two)");
  binders["dirichlet"].bind(dirichlet, "--f", "dirichlet.f", "cos1 | cos12 | zero | one");
  binders["dirichlet"].bind(dirichlet, "--eps-list", "dirichlet.eps_list", "decreasing eps values");
  experiment_of[dirichlet] = "dirichlet";

  auto* check = app.add_subcommand("check", "metric validity suite");
  add_metric_flags(check, binders["check"]);
  binders["check"].bind(check, "--samples", "check.samples", "random (x, y) samples");
  experiment_of[check] = "check";

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return finsler::kExitConfig;
  }

  std::string experiment;
  for (const auto& [sub, name] : experiment_of) {
    if (sub->parsed()) experiment = name;
  }
  Overrides overrides{{"experiment", experiment}};
  binders[experiment].collect(overrides);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--set expects key=value, got '" << s << "'\n";
      return finsler::kExitConfig;
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }

  std::string file_text;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    std::ostringstream ss;
    ss << f.rdbuf();
    file_text = ss.str();
  }
  finsler::set_thread_count(threads);
  return finsler::run(merge(file_text, overrides), out_path, std::cerr);
}
