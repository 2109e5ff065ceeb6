#include "finsler/approximation.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace finsler {
namespace {

std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os.precision(12);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

double box_bump(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 / (t * t - 1.0)) : 0.0; }

double box_bump_d(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = t * t - 1.0;
  return box_bump(t) * (-2.0 * t / (q * q));
}

// Tensor-product bump of a box and its gradient.
double product_bump(const Box& b, const Vec& x, Vec* grad) {
  const int n = static_cast<int>(x.size());
  double factors[kMaxDim], derivs[kMaxDim];
  double prod = 1.0;
  for (int k = 0; k < n; ++k) {
    const double c = 0.5 * (b.lo[k] + b.hi[k]);
    const double half = 0.5 * (b.hi[k] - b.lo[k]);
    const double t = (x[k] - c) / half;
    factors[k] = box_bump(t);
    derivs[k] = box_bump_d(t) / half;
    prod *= factors[k];
  }
  if (grad) {
    grad->setZero(n);
    for (int k = 0; k < n; ++k) {
      double g = derivs[k];
      for (int l = 0; l < n; ++l) {
        if (l != k) g *= factors[l];
      }
      (*grad)[k] = g;
    }
  }
  return prod;
}

}  // namespace

void ConvergenceTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw ArgumentError("convergence table: row width mismatch");
  if (rows.size() >= 2) {
    const double a = rows[rows.size() - 2][0], b = rows.back()[0];
    const bool up = b > a;
    if (up ? !(row[0] > b) : !(row[0] < b)) throw ArgumentError("convergence table: parameters must be strictly monotone");
  } else if (rows.size() == 1 && row[0] == rows[0][0]) {
    throw ArgumentError("convergence table: parameters must be strictly monotone");
  }
  rows.push_back(std::move(row));
}

void ConvergenceTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

std::vector<double> ConvergenceTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ArgumentError("convergence table: no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string ConvergenceTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

double truncation_profile(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - t;
}

double truncation_profile_derivative(double t) { return t > 0.0 && t < 1.0 ? -1.0 : 0.0; }

ScalarField truncate(const ScalarField& phi, const FinslerMetric& metric, const Point& x0, int j,
                     const DistanceProvider& provider, const Vec& lo, const Vec& hi) {
  if (j < 1) throw ArgumentError("truncate: j must be >= 1");
  auto df = std::make_shared<DistanceFunction>(make_distance_function(metric, x0, provider, lo, hi));
  ScalarField out;
  out.value = [phi, df, j](const Vec& x) {
    const double f = truncation_profile(df->value(Point(x)) - j);
    return f == 0.0 ? 0.0 : phi.value(x) * f;
  };
  out.gradient = [phi, df, j](const Vec& x) {
    const double t = df->value(Point(x)) - j;
    const double f = truncation_profile(t);
    const double fp = truncation_profile_derivative(t);
    Vec g = phi.grad(x) * f;
    if (fp != 0.0) g += phi.value(x) * fp * df->gradient(Point(x));
    return g;
  };
  out.smoothness = Smoothness::Piecewise;
  out.name = phi.name + "_j" + std::to_string(j);
  return out;
}

ConvergenceTable density_experiment(const FinslerMetric& metric, const ScalarField& phi, double p,
                                    int j_max, const DistanceProvider& provider,
                                    const FiberQuadrature& rule, const Domain& domain,
                                    const Point& x0) {
  if (j_max < 1) throw ArgumentError("density_experiment: jmax must be >= 1");
  const SobolevSpec spec{1, p};
  spec.validate();
  const DistanceFunction df = make_distance_function(metric, x0, provider, domain.lo(), domain.hi());
  const NodeSamples s = sample(phi, domain, true);
  const std::size_t count = domain.node_count();
  const int n = domain.dim();
  std::vector<double> dist(count, 0.0);
  std::vector<Vec> dgrad(count, Vec::Zero(n));
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    const Point x(domain.node(i));
    dist[i] = df.value(x);
    // the cutoff derivative is nonzero only on the shells j < d < j + 1
    if (dist[i] > 1.0 && dist[i] < j_max + 1.0 && s.values[i] != 0.0) dgrad[i] = df.gradient(x);
  });

  ConvergenceTable table;
  table.columns = {"j", "lp_sm", "grad_lp_sm", "h1p"};
  for (int j = 1; j <= j_max; ++j) {
    std::vector<double> values(count, 0.0), grads(count * static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = dist[i] - j;
      const double f = truncation_profile(t);
      const double fp = truncation_profile_derivative(t);
      values[i] = s.values[i] * (f - 1.0);
      Vec g = s.gradients[i] * (f - 1.0);
      if (fp != 0.0) g += s.values[i] * fp * dgrad[i];
      for (int k = 0; k < n; ++k) grads[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = g[k];
    }
    const ScalarField diff = grid_field(domain, std::move(values), std::move(grads), "phi_j-phi");
    const SobolevTerms t = sobolev_terms(metric, diff, spec, domain, rule);
    table.add_row({static_cast<double>(j), t.lp, t.grad_lp, t.total});
  }
  table.set_meta("metric", metric.describe());
  table.set_meta("field", phi.name);
  table.set_meta("spec", spec.describe());
  table.set_meta("center", vec_str(x0.coords));
  table.set_meta("provider", df.provider);
  table.set_meta("domain", domain.describe());
  table.set_meta("fiber", rule.describe());
  return table;
}

ConvergenceTable mollification_convergence(const FinslerMetric& metric, const ScalarField& u,
                                           double p, const std::vector<double>& eps_list,
                                           const Domain& domain, const FiberQuadrature& rule,
                                           double margin) {
  if (eps_list.empty()) throw ArgumentError("mollification_convergence: empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw ArgumentError("mollification_convergence: eps list must be strictly decreasing");
  }
  const SobolevSpec spec{1, p};
  spec.validate();
  if (margin < 0.0) margin = eps_list.front();
  Domain interior = domain;
  if (domain.kind() != DomainKind::Torus && margin > 0.0) {
    const Vec lo = (domain.lo().array() + margin).matrix();
    const Vec hi = (domain.hi().array() - margin).matrix();
    for (int k = 0; k < domain.dim(); ++k) {
      if (!(lo[k] < hi[k])) throw ArgumentError("mollification_convergence: margin leaves no interior");
    }
    interior = domain.restricted(lo, hi);
  }
  // u sampled once at the nodes so differences are taken against the same grid data
  const NodeSamples s = sample(u, domain, true);
  const std::size_t count = domain.node_count();
  const int n = domain.dim();
  std::vector<double> ugrad(count * static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 0; k < n; ++k) ugrad[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = s.gradients[i][k];
  }
  const ScalarField ug = grid_field(domain, s.values, ugrad, u.name);
  const SobolevSpec l_only{0, p};
  const double u_norm = classical_sobolev_terms(ug, l_only, domain).lp;

  ConvergenceTable table;
  table.columns = {"eps", "lp_err", "h1p_err", "young_ratio"};
  for (double eps : eps_list) {
    const ScalarField m = mollify(ug, MollifierSpec::make(n, eps), domain);
    const auto& mv = m.grid->values;
    const auto& mg = m.grid->gradients;
    std::vector<double> dv(count), dg(count * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < count; ++i) dv[i] = mv[i] - s.values[i];
    for (std::size_t i = 0; i < dg.size(); ++i) dg[i] = mg[i] - ugrad[i];
    const ScalarField diff = grid_field(domain, std::move(dv), std::move(dg), "J*u-u");
    const SobolevTerms t = sobolev_terms(metric, diff, spec, interior, rule);
    const double m_norm = classical_sobolev_terms(m, l_only, domain).lp;
    const double young = u_norm > 0.0 ? m_norm / u_norm : 0.0;
    table.add_row({eps, t.lp, t.total, young});
  }
  table.set_meta("metric", metric.describe());
  table.set_meta("field", u.name);
  table.set_meta("spec", spec.describe());
  table.set_meta("domain", domain.describe());
  table.set_meta("interior", interior.describe());
  table.set_meta("fiber", rule.describe());
  table.set_meta("convolution", domain.kind() == DomainKind::Torus ? "fft-circular" : "direct");
  return table;
}

ScalarField boundary_translate(const ScalarField& u, int m) {
  if (m < 1) throw ArgumentError("boundary_translate: m must be >= 1");
  const double s = 1.0 / m;
  auto shift = [s](const Vec& x) {
    Vec y = x;
    y[0] -= s;
    return y;
  };
  ScalarField h;
  h.value = [u, shift](const Vec& x) { return u.value(shift(x)); };
  h.gradient = [u, shift](const Vec& x) { return u.grad(shift(x)); };
  h.smoothness = u.smoothness;
  h.fd_step = u.fd_step;
  h.name = u.name + "_m" + std::to_string(m);
  return h;
}

std::vector<ScalarField> partition_of_unity(const std::vector<Box>& cover, const Box& region,
                                            int check_per_axis) {
  if (cover.empty()) throw ArgumentError("partition_of_unity: empty cover");
  const auto n = region.lo.size();
  for (const auto& b : cover) {
    if (b.lo.size() != n || b.hi.size() != n) throw ArgumentError("partition_of_unity: box dimension mismatch");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(b.lo[k] < b.hi[k])) throw ArgumentError("partition_of_unity: degenerate box");
    }
  }
  if (check_per_axis < 2) throw ArgumentError("partition_of_unity: need >= 2 check points per axis");
  std::size_t total = 1;
  for (Eigen::Index k = 0; k < n; ++k) total *= static_cast<std::size_t>(check_per_axis);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec x(n);
    std::size_t rem = idx;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto i = static_cast<double>(rem % static_cast<std::size_t>(check_per_axis));
      rem /= static_cast<std::size_t>(check_per_axis);
      x[k] = region.lo[k] + (region.hi[k] - region.lo[k]) * i / (check_per_axis - 1);
    }
    double sum = 0.0;
    for (const auto& b : cover) sum += product_bump(b, x, nullptr);
    if (!(sum > 0.0)) throw ArgumentError("partition_of_unity: point " + vec_str(x) + " is not covered");
  }
  auto boxes = std::make_shared<const std::vector<Box>>(cover);
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    ScalarField a;
    a.value = [boxes, i](const Vec& x) {
      double sum = 0.0, mine = 0.0;
      for (std::size_t j = 0; j < boxes->size(); ++j) {
        const double b = product_bump((*boxes)[j], x, nullptr);
        sum += b;
        if (j == i) mine = b;
      }
      return sum > 0.0 ? mine / sum : 0.0;
    };
    a.gradient = [boxes, i](const Vec& x) {
      const auto dim = x.size();
      double sum = 0.0, mine = 0.0;
      Vec gsum = Vec::Zero(dim), gmine = Vec::Zero(dim), g(dim);
      for (std::size_t j = 0; j < boxes->size(); ++j) {
        const double b = product_bump((*boxes)[j], x, &g);
        sum += b;
        gsum += g;
        if (j == i) {
          mine = b;
          gmine = g;
        }
      }
      if (!(sum > 0.0)) return Vec(Vec::Zero(dim));
      return Vec((gmine * sum - mine * gsum) / (sum * sum));
    };
    a.name = "alpha" + std::to_string(i);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace finsler
