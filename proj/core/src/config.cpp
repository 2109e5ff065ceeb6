#include "finsler/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace finsler {
namespace {

struct Bad {
  std::string message;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw Bad{"expected a number, got '" + t + "'"};
  }
  return v;
}

int parse_int(const std::string& s) {
  const std::string t = trim(s);
  int v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw Bad{"expected an integer, got '" + t + "'"};
  }
  return v;
}

bool parse_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw Bad{"expected true or false, got '" + t + "'"};
}

std::vector<double> parse_list(const std::string& s) {
  std::string t = trim(s);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw Bad{"unterminated list '" + t + "'"};
    t = t.substr(1, t.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw Bad{"empty list"};
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  if (v.size() > static_cast<std::size_t>(kMaxDim)) throw Bad{"vector longer than 3 entries"};
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

std::string vec_str(const Vec& v) {
  return list_str(std::vector<double>(v.data(), v.data() + v.size()));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Bad{message};
}

std::vector<double> positive_list(const std::string& s, const char* what) {
  auto v = parse_list(s);
  for (double x : v) require(x > 0.0, std::string(what) + " entries must be positive");
  return v;
}

using Handler = std::function<void(const std::string&, RunConfig&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"experiment",
       [](const std::string& v, RunConfig& c) {
         const auto& names = experiment_names();
         require(std::find(names.begin(), names.end(), v) != names.end(), "unknown experiment '" + v + "'");
         c.experiment = v;
       }},
      {"metric.kind",
       [](const std::string& v, RunConfig& c) {
         static const std::set<std::string> kinds{"euclidean", "conformal", "randers", "funk", "quartic"};
         require(kinds.count(v) > 0, "unknown metric kind '" + v + "'");
         c.metric.kind = v;
       }},
      {"metric.dim",
       [](const std::string& v, RunConfig& c) {
         c.metric.dim = parse_int(v);
         require(c.metric.dim >= 1 && c.metric.dim <= 3, "metric.dim must be 1, 2 or 3");
       }},
      {"metric.b", [](const std::string& v, RunConfig& c) { c.metric.b = to_vec(parse_list(v)); }},
      {"metric.a",
       [](const std::string& v, RunConfig& c) {
         const auto l = parse_list(v);
         const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(l.size()))));
         require(n >= 1 && n <= 3 && static_cast<std::size_t>(n * n) == l.size(), "metric.a must list n*n entries");
         Mat a(n, n);
         for (int i = 0; i < n; ++i) {
           for (int j = 0; j < n; ++j) a(i, j) = l[static_cast<std::size_t>(i * n + j)];
         }
         c.metric.a = a;
       }},
      {"metric.epsilon",
       [](const std::string& v, RunConfig& c) {
         c.metric.epsilon = parse_double(v);
         require(c.metric.epsilon >= 0.0 && c.metric.epsilon <= 0.2, "metric.epsilon must lie in [0, 0.2]");
       }},
      {"metric.lambda", [](const std::string& v, RunConfig& c) { c.metric.lambda = to_vec(parse_list(v)); }},
      {"metric.lambda0", [](const std::string& v, RunConfig& c) { c.metric.lambda0 = parse_double(v); }},
      {"metric.reversed", [](const std::string& v, RunConfig& c) { c.metric.reversed = parse_bool(v); }},
      {"domain.kind",
       [](const std::string& v, RunConfig& c) {
         require(v == "box" || v == "ball" || v == "half_ball" || v == "torus", "unknown domain kind '" + v + "'");
         c.domain.kind = v;
       }},
      {"domain.bounds", [](const std::string& v, RunConfig& c) { c.domain.bounds = parse_list(v); }},
      {"domain.radius",
       [](const std::string& v, RunConfig& c) {
         c.domain.radius = parse_double(v);
         require(c.domain.radius > 0.0, "domain.radius must be positive");
       }},
      {"quad.fiber_nodes",
       [](const std::string& v, RunConfig& c) {
         c.fiber_nodes = parse_int(v);
         require(c.fiber_nodes >= 2, "quad.fiber_nodes must be >= 2");
       }},
      {"quad.base_resolution",
       [](const std::string& v, RunConfig& c) {
         c.base_resolution = parse_int(v);
         require(c.base_resolution >= 8, "quad.base_resolution must be >= 8");
       }},
      {"sobolev.k",
       [](const std::string& v, RunConfig& c) {
         const int k = parse_int(v);
         require(k >= 0, "sobolev.k must be >= 0");
         require(k <= 1, "unsupported order k=" + std::to_string(k) + " (only k in {0,1})");
         c.sobolev.k = k;
       }},
      {"sobolev.p",
       [](const std::string& v, RunConfig& c) {
         c.sobolev.p = parse_double(v);
         require(c.sobolev.p >= 1.0, "sobolev.p must be >= 1");
       }},
      {"field", [](const std::string& v, RunConfig& c) { c.field = v; }},
      {"distance.tier",
       [](const std::string& v, RunConfig& c) {
         try {
           c.distance.tier = parse_distance_tier(v);
         } catch (const Error& e) {
           throw Bad{e.what()};
         }
       }},
      {"distance.grid_n",
       [](const std::string& v, RunConfig& c) {
         c.distance.grid_n = parse_int(v);
         require(c.distance.grid_n >= 8, "distance.grid_n must be >= 8");
       }},
      {"distance.descent_iters",
       [](const std::string& v, RunConfig& c) {
         c.distance.descent_iters = parse_int(v);
         require(c.distance.descent_iters >= 1, "distance.descent_iters must be >= 1");
       }},
      {"distance.stencil",
       [](const std::string& v, RunConfig& c) {
         c.distance.stencil = parse_int(v);
         require(c.distance.stencil >= 0 && c.distance.stencil <= 8, "distance.stencil must lie in [0, 8]");
       }},
      {"density.jmax",
       [](const std::string& v, RunConfig& c) {
         c.density_jmax = parse_int(v);
         require(c.density_jmax >= 1 && c.density_jmax <= 64, "density.jmax must lie in [1, 64]");
       }},
      {"density.center", [](const std::string& v, RunConfig& c) { c.density_center = to_vec(parse_list(v)); }},
      {"mollify.eps_list", [](const std::string& v, RunConfig& c) { c.mollify_eps = positive_list(v, "mollify.eps_list"); }},
      {"geodesic.x", [](const std::string& v, RunConfig& c) { c.geodesic_x = to_vec(parse_list(v)); }},
      {"geodesic.v", [](const std::string& v, RunConfig& c) { c.geodesic_v = to_vec(parse_list(v)); }},
      {"geodesic.T",
       [](const std::string& v, RunConfig& c) {
         c.geodesic_T = parse_double(v);
         require(c.geodesic_T > 0.0, "geodesic.T must be positive");
       }},
      {"geodesic.steps",
       [](const std::string& v, RunConfig& c) {
         c.geodesic_steps = parse_int(v);
         require(c.geodesic_steps >= 16, "geodesic.steps must be >= 16");
       }},
      {"geodesic.stride",
       [](const std::string& v, RunConfig& c) {
         c.geodesic_stride = parse_int(v);
         require(c.geodesic_stride >= 1, "geodesic.stride must be >= 1");
       }},
      {"fiber_decay.L",
       [](const std::string& v, RunConfig& c) {
         c.fiber_decay_L = parse_list(v);
         for (double L : c.fiber_decay_L) require(L >= 1.0, "fiber_decay.L entries must be >= 1");
       }},
      {"sharpness.p",
       [](const std::string& v, RunConfig& c) {
         c.sharpness_p = parse_double(v);
         require(c.sharpness_p >= 1.0, "sharpness.p must be >= 1");
       }},
      {"sharpness.widths",
       [](const std::string& v, RunConfig& c) {
         c.sharpness_widths = parse_list(v);
         for (double w : c.sharpness_widths) require(w > 0.0 && w <= 1.0, "sharpness.widths entries must lie in (0, 1]");
       }},
      {"sharpness.resolution",
       [](const std::string& v, RunConfig& c) {
         c.sharpness_resolution = parse_int(v);
         require(c.sharpness_resolution >= 16 && c.sharpness_resolution % 2 == 0,
                 "sharpness.resolution must be even and >= 16");
       }},
      {"dirichlet.n",
       [](const std::string& v, RunConfig& c) {
         c.dirichlet_n = parse_int(v);
         require(c.dirichlet_n >= 16 && (c.dirichlet_n & (c.dirichlet_n - 1)) == 0,
                 "dirichlet.n must be a power of two >= 16");
       }},
      {"dirichlet.f",
       [](const std::string& v, RunConfig& c) {
         require(v == "cos1" || v == "cos12" || v == "zero" || v == "one", "dirichlet.f must be one of cos1, cos12, zero, one");
         c.dirichlet_f = v;
       }},
      {"dirichlet.eps_list", [](const std::string& v, RunConfig& c) { c.dirichlet_eps = positive_list(v, "dirichlet.eps_list"); }},
      {"check.samples",
       [](const std::string& v, RunConfig& c) {
         c.check_samples = parse_int(v);
         require(c.check_samples >= 100, "check.samples must be >= 100");
       }},
      {"output", [](const std::string& v, RunConfig& c) { c.output = v; }},
  };
  return table;
}

bool uses_metric(const std::string& experiment) {
  return experiment == "norm" || experiment == "density" || experiment == "mollify" ||
         experiment == "geodesic" || experiment == "check";
}

void build_echo(RunConfig& c) {
  auto& e = c.echo;
  e.clear();
  e.emplace_back("experiment", c.experiment);
  if (uses_metric(c.experiment)) {
    const int n = c.metric.dim;
    e.emplace_back("metric.kind", c.metric.kind);
    e.emplace_back("metric.dim", std::to_string(n));
    if (c.metric.b) e.emplace_back("metric.b", vec_str(*c.metric.b));
    if (c.metric.a) {
      const Mat& a = *c.metric.a;
      std::vector<double> flat;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) flat.push_back(a(i, j));
      }
      e.emplace_back("metric.a", list_str(flat));
    }
    if (c.metric.kind == "quartic") e.emplace_back("metric.epsilon", fmt(c.metric.epsilon));
    if (c.metric.kind == "conformal") {
      e.emplace_back("metric.lambda", vec_str(c.metric.lambda.value_or(Vec::Zero(n))));
      e.emplace_back("metric.lambda0", fmt(c.metric.lambda0));
    }
    e.emplace_back("metric.reversed", c.metric.reversed ? "true" : "false");
  }
  if (c.experiment == "norm" || c.experiment == "density" || c.experiment == "mollify") {
    e.emplace_back("domain.kind", c.domain.kind);
    if (c.domain.bounds) e.emplace_back("domain.bounds", list_str(*c.domain.bounds));
    if (c.domain.kind == "ball" || c.domain.kind == "half_ball") e.emplace_back("domain.radius", fmt(c.domain.radius));
    e.emplace_back("quad.fiber_nodes", std::to_string(c.fiber_nodes));
    e.emplace_back("quad.base_resolution", std::to_string(c.base_resolution));
    e.emplace_back("field", c.field);
  }
  if (c.experiment == "norm" || c.experiment == "density") {
    e.emplace_back("sobolev.k", std::to_string(c.sobolev.k));
    e.emplace_back("sobolev.p", fmt(c.sobolev.p));
  }
  if (c.experiment == "mollify") {
    e.emplace_back("sobolev.p", fmt(c.sobolev.p));
    e.emplace_back("mollify.eps_list", list_str(c.mollify_eps));
  }
  if (c.experiment == "density") {
    e.emplace_back("distance.tier", to_string(c.distance.tier));
    e.emplace_back("distance.grid_n", std::to_string(c.distance.grid_n));
    e.emplace_back("distance.descent_iters", std::to_string(c.distance.descent_iters));
    e.emplace_back("distance.stencil", std::to_string(c.distance.stencil));
    e.emplace_back("density.jmax", std::to_string(c.density_jmax));
    e.emplace_back("density.center", vec_str(c.density_center.value_or(Vec::Zero(c.metric.dim))));
  }
  if (c.experiment == "geodesic") {
    const int n = c.metric.dim;
    Vec v0 = Vec::Zero(n);
    v0[0] = 1.0;
    e.emplace_back("geodesic.x", vec_str(c.geodesic_x.value_or(Vec::Zero(n))));
    e.emplace_back("geodesic.v", vec_str(c.geodesic_v.value_or(v0)));
    e.emplace_back("geodesic.T", fmt(c.geodesic_T));
    e.emplace_back("geodesic.steps", std::to_string(c.geodesic_steps));
    e.emplace_back("geodesic.stride", std::to_string(c.geodesic_stride));
  }
  if (c.experiment == "fiber-decay") e.emplace_back("fiber_decay.L", list_str(c.fiber_decay_L));
  if (c.experiment == "sharpness") {
    e.emplace_back("sharpness.p", fmt(c.sharpness_p));
    e.emplace_back("sharpness.widths", list_str(c.sharpness_widths));
    e.emplace_back("sharpness.resolution", std::to_string(c.sharpness_resolution));
  }
  if (c.experiment == "dirichlet") {
    e.emplace_back("dirichlet.n", std::to_string(c.dirichlet_n));
    e.emplace_back("dirichlet.f", c.dirichlet_f);
    e.emplace_back("dirichlet.eps_list", list_str(c.dirichlet_eps));
  }
  if (c.experiment == "check") e.emplace_back("check.samples", std::to_string(c.check_samples));
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : ArgumentError([&] {
        std::ostringstream os;
        os << issues.size() << " config error(s):";
        for (const auto& i : issues) {
          os << "\n  ";
          if (i.line > 0) os << "line " << i.line << ": ";
          os << i.message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<ConfigIssue> issues;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "expected 'key = value', got '" + line + "'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = handlers();
    const auto it = table.find(key);
    if (it == table.end()) {
      issues.push_back({line_no, "unknown key '" + key + "'"});
      continue;
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      issues.push_back({line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")"});
      continue;
    }
    seen[key] = line_no;
    if (value.empty()) {
      issues.push_back({line_no, "key '" + key + "' has an empty value"});
      continue;
    }
    try {
      it->second(value, c);
    } catch (const Bad& b) {
      issues.push_back({line_no, key + ": " + b.message});
    }
  }

  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  if (!seen.count("experiment")) issues.push_back({0, "missing required key 'experiment'"});
  if (uses_metric(c.experiment)) {
    const int n = c.metric.dim;
    if (!seen.count("metric.kind")) {
      issues.push_back({0, "missing required key 'metric.kind' for experiment '" + c.experiment + "'"});
    }
    if (c.metric.kind == "randers" && !c.metric.b) {
      issues.push_back({line_of("metric.kind"), "missing required key 'metric.b' for metric.kind = randers"});
    }
    auto check_dim = [&](const std::optional<Vec>& v, const char* key) {
      if (v && v->size() != n) {
        issues.push_back({line_of(key), std::string(key) + " must have " + std::to_string(n) + " entries"});
      }
    };
    check_dim(c.metric.b, "metric.b");
    check_dim(c.metric.lambda, "metric.lambda");
    check_dim(c.density_center, "density.center");
    check_dim(c.geodesic_x, "geodesic.x");
    check_dim(c.geodesic_v, "geodesic.v");
    if (c.metric.a && c.metric.a->rows() != n) {
      issues.push_back({line_of("metric.a"), "metric.a must be " + std::to_string(n) + "x" + std::to_string(n)});
    }
    if (c.metric.b && c.metric.kind != "randers") {
      issues.push_back({line_of("metric.b"), "metric.b only applies to metric.kind = randers"});
    }
    if (c.domain.bounds) {
      const auto m = c.domain.bounds->size();
      if (m != 2 && m != static_cast<std::size_t>(2 * n)) {
        issues.push_back({line_of("domain.bounds"), "domain.bounds needs [lo, hi] or lo/hi pairs for every axis"});
      } else {
        for (std::size_t i = 0; i + 1 < m; i += 2) {
          if (!((*c.domain.bounds)[i] < (*c.domain.bounds)[i + 1])) {
            issues.push_back({line_of("domain.bounds"), "domain.bounds needs lo < hi"});
            break;
          }
        }
      }
    }
  }
  for (const auto& [list, key] : {std::pair{&c.mollify_eps, "mollify.eps_list"}, {&c.dirichlet_eps, "dirichlet.eps_list"}}) {
    for (std::size_t i = 1; i < list->size(); ++i) {
      if (!((*list)[i] < (*list)[i - 1])) {
        issues.push_back({line_of(key), std::string(key) + " must be strictly decreasing"});
        break;
      }
    }
  }
  for (const auto& [list, key] : {std::pair{&c.fiber_decay_L, "fiber_decay.L"}, {&c.sharpness_widths, "sharpness.widths"}}) {
    for (std::size_t i = 1; i < list->size(); ++i) {
      if (!((*list)[i] > (*list)[i - 1])) {
        issues.push_back({line_of(key), std::string(key) + " must be strictly increasing"});
        break;
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  build_echo(c);
  return c;
}

FinslerMetric build_metric(const RunConfig& config) {
  const MetricConfig& m = config.metric;
  const int n = m.dim;
  FinslerMetric metric = FinslerMetric::euclidean(n);
  if (m.kind == "euclidean") {
    metric = FinslerMetric::euclidean(n);
  } else if (m.kind == "conformal") {
    metric = FinslerMetric::conformal(n, ConformalFactor::linear(m.lambda.value_or(Vec::Zero(n)), m.lambda0));
  } else if (m.kind == "randers") {
    metric = FinslerMetric::randers(m.a.value_or(Mat::Identity(n, n)), *m.b);
  } else if (m.kind == "funk") {
    metric = FinslerMetric::funk(n);
  } else if (m.kind == "quartic") {
    metric = FinslerMetric::quartic(n, m.epsilon);
  } else {
    throw ArgumentError("unknown metric kind '" + m.kind + "'");
  }
  return m.reversed ? reverse_metric(metric) : metric;
}

Domain build_domain(const RunConfig& config) {
  const int n = config.metric.dim;
  const int res = config.base_resolution;
  const DomainConfig& d = config.domain;
  if (d.kind == "ball") return Domain::ball(n, d.radius, res);
  if (d.kind == "half_ball") return Domain::half_ball(n, d.radius, res);
  Vec lo(n), hi(n);
  const double def = config.metric.kind == "funk" ? 0.9 : 6.0;
  for (int k = 0; k < n; ++k) {
    if (!d.bounds) {
      lo[k] = -def;
      hi[k] = def;
    } else if (d.bounds->size() == 2) {
      lo[k] = (*d.bounds)[0];
      hi[k] = (*d.bounds)[1];
    } else {
      lo[k] = (*d.bounds)[static_cast<std::size_t>(2 * k)];
      hi[k] = (*d.bounds)[static_cast<std::size_t>(2 * k + 1)];
    }
  }
  if (d.kind == "torus") {
    if (!lo.isZero(0.0)) throw ArgumentError("torus domains start at 0; give domain.bounds = [0, period]");
    return Domain::torus(hi, res);
  }
  return Domain::box(lo, hi, res);
}

FiberQuadrature build_fiber_rule(const RunConfig& config) {
  const int n = config.metric.dim;
  // for n = 3 the count is the number of polar nodes
  const int nodes = n == 3 ? std::max(2, config.fiber_nodes / 8) : std::max(4, config.fiber_nodes);
  return FiberQuadrature::make(n, nodes);
}

}  // namespace finsler
