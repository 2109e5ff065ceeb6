#include "finsler/sobolev.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"
#include "finsler/sphere_bundle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace finsler {
namespace {

double root(double integral, double p) { return integral <= 0.0 ? 0.0 : std::pow(integral, 1.0 / p); }

double pow_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// ratio xi(theta) / F(x, theta) for a unit direction at angle t (n = 2)
double ratio_at(const FinslerMetric& metric, const Point& x, const Vec& xi, double t) {
  const Vec th = make_vec({std::cos(t), std::sin(t)});
  return xi.dot(th) / metric.F(x, th);
}

Vec spherical(double polar, double az) {
  return make_vec({std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar)});
}

}  // namespace

void SobolevSpec::validate() const {
  if (k < 0) throw ArgumentError("sobolev: order k must be >= 0");
  if (k >= 2) {
    throw UnsupportedError("unsupported order k=" + std::to_string(k) + " (only k in {0,1})");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("sobolev: exponent p must be >= 1");
}

std::string SobolevSpec::describe() const {
  std::ostringstream os;
  os << "H_" << k << "^" << p;
  return os.str();
}

double horizontal_gradient_norm(const FinslerMetric& metric, const ScalarField& u,
                                const TangentVector& v) {
  const Mat g = metric.fundamental_tensor(v.base, v.components);
  const Vec du = u.grad(v.base.coords);
  const double q = du.dot(g.ldlt().solve(du));
  return std::sqrt(std::max(q, 0.0));
}

SobolevTerms sobolev_terms(const FinslerMetric& metric, const ScalarField& u,
                           const SobolevSpec& spec, const Domain& domain,
                           const FiberQuadrature& rule) {
  spec.validate();
  if (domain.dim() != metric.dim()) throw ArgumentError("sobolev: domain dimension does not match metric");
  const bool grad = spec.k >= 1;
  const NodeSamples s = sample(u, domain, grad);
  const FiberCache cache(metric, rule);
  const std::size_t count = domain.node_count();
  std::vector<double> val(count, 0.0), gra(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    const Vec x = domain.node(i);
    std::vector<FiberFrame> scratch;
    const auto& frames = cache.frames(x, scratch);
    std::vector<double> mass(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) mass[k] = frames[k].weight;
    val[i] = pow_abs(s.values[i], spec.p) * pairwise_sum(mass);
    if (!grad) return;
    const Vec& du = s.gradients[i];
    std::vector<double> terms(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const double q = std::max(du.dot(frames[k].g_inv * du), 0.0);
      terms[k] = frames[k].weight * (spec.p == 2.0 ? q : std::pow(q, 0.5 * spec.p));
    }
    gra[i] = pairwise_sum(terms);
  });
  SobolevTerms t;
  t.lp = root(base_quadrature_values(domain, val), spec.p);
  if (grad) t.grad_lp = root(base_quadrature_values(domain, gra), spec.p);
  t.total = t.lp + t.grad_lp;
  return t;
}

double sobolev_norm(const FinslerMetric& metric, const ScalarField& u, const SobolevSpec& spec,
                    const Domain& domain, const FiberQuadrature& rule) {
  return sobolev_terms(metric, u, spec, domain, rule).total;
}

double lp_norm_SM(const FinslerMetric& metric, const ScalarField& u, double p,
                  const Domain& domain, const FiberQuadrature& rule) {
  return sobolev_terms(metric, u, SobolevSpec{0, p}, domain, rule).lp;
}

double lp_norm_M(const FinslerMetric& metric, const ScalarField& u, double p,
                 const Domain& domain, const FiberQuadrature& rule) {
  SobolevSpec{0, p}.validate();
  const NodeSamples s = sample(u, domain, false);
  const FiberCache cache(metric, rule);
  const double c = sphere_volume(metric.dim());
  const std::size_t count = domain.node_count();
  std::vector<double> val(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    val[i] = pow_abs(s.values[i], p) * cache.fiber_mass(domain.node(i)) / c;
  });
  return root(base_quadrature_values(domain, val), p);
}

SobolevTerms classical_sobolev_terms(const ScalarField& u, const SobolevSpec& spec,
                                     const Domain& domain) {
  spec.validate();
  const bool grad = spec.k >= 1;
  const NodeSamples s = sample(u, domain, grad);
  const std::size_t count = domain.node_count();
  std::vector<double> val(count, 0.0), gra(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    val[i] = pow_abs(s.values[i], spec.p);
    if (grad) gra[i] = pow_abs(s.gradients[i].norm(), spec.p);
  }
  SobolevTerms t;
  t.lp = root(base_quadrature_values(domain, val), spec.p);
  if (grad) t.grad_lp = root(base_quadrature_values(domain, gra), spec.p);
  t.total = t.lp + t.grad_lp;
  return t;
}

double dual_norm(const FinslerMetric& metric, const Point& x, const Vec& xi) {
  const int n = metric.dim();
  if (xi.size() != n) throw ArgumentError("dual_norm: covector dimension mismatch");
  if (xi.isZero(0.0)) return 0.0;
  if (n == 1) {
    const Vec e = make_vec({1.0});
    return std::max(xi[0] / metric.F(x, e), -xi[0] / metric.F(x, Vec(-e)));
  }
  if (n == 2) {
    constexpr int kScan = 64;
    const double seed = std::atan2(xi[1], xi[0]);
    const double dt = 2.0 * std::numbers::pi / kScan;
    double best_t = seed;
    double best = ratio_at(metric, x, xi, seed);
    for (int k = 1; k < kScan; ++k) {
      const double t = seed + k * dt;
      const double r = ratio_at(metric, x, xi, t);
      if (r > best) {
        best = r;
        best_t = t;
      }
    }
    // golden-section on [best_t - dt, best_t + dt]
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_t - dt, b = best_t + dt;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = ratio_at(metric, x, xi, c), fd = ratio_at(metric, x, xi, d);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = ratio_at(metric, x, xi, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = ratio_at(metric, x, xi, d);
      }
    }
    return std::max({best, fc, fd});
  }
  auto ratio = [&](double polar, double az) {
    const Vec th = spherical(polar, az);
    return xi.dot(th) / metric.F(x, th);
  };
  constexpr int kPolar = 24;
  double bp = 0.0, ba = 0.0, best = -1e300;
  for (int i = 0; i <= kPolar; ++i) {
    const double polar = std::numbers::pi * i / kPolar;
    for (int k = 0; k < 2 * kPolar; ++k) {
      const double az = std::numbers::pi * k / kPolar;
      const double r = ratio(polar, az);
      if (r > best) {
        best = r;
        bp = polar;
        ba = az;
      }
    }
  }
  double step = std::numbers::pi / kPolar;
  while (step > 1e-12) {
    bool moved = false;
    for (const auto& [dp, da] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const double r = ratio(bp + dp * step, ba + da * step);
      if (r > best) {
        best = r;
        bp += dp * step;
        ba += da * step;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

double dual_norm_brute_force(const FinslerMetric& metric, const Point& x, const Vec& xi,
                             int samples) {
  const int n = metric.dim();
  if (samples < 2) throw ArgumentError("dual_norm_brute_force: need samples >= 2");
  double best = -1e300;
  if (n == 1) return dual_norm(metric, x, xi);
  if (n == 2) {
    for (int k = 0; k < samples; ++k) {
      best = std::max(best, ratio_at(metric, x, xi, 2.0 * std::numbers::pi * k / samples));
    }
    return best;
  }
  const int m = std::max(2, static_cast<int>(std::sqrt(samples / 2.0)));
  for (int i = 0; i <= m; ++i) {
    for (int k = 0; k < 2 * m; ++k) {
      const Vec th = spherical(std::numbers::pi * i / m, std::numbers::pi * k / m);
      best = std::max(best, xi.dot(th) / metric.F(x, th));
    }
  }
  return best;
}

double gs_norm(const FinslerMetric& metric, const ScalarField& u, const Domain& domain,
               const FiberQuadrature& rule) {
  if (!metric.reversible()) {
    throw ReversibilityError("gs_norm: metric " + metric.describe() +
                             " is not reversible; the comparison norm is undefined");
  }
  const NodeSamples s = sample(u, domain, true);
  const FiberCache cache(metric, rule);
  const double c = sphere_volume(metric.dim());
  const std::size_t count = domain.node_count();
  std::vector<double> val(count, 0.0), gra(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    const Vec x = domain.node(i);
    const double sigma = cache.fiber_mass(x) / c;
    val[i] = s.values[i] * s.values[i] * sigma;
    const double dn = dual_norm(metric, Point(x), s.gradients[i]);
    gra[i] = dn * dn * sigma;
  });
  return root(base_quadrature_values(domain, val), 2.0) + root(base_quadrature_values(domain, gra), 2.0);
}

}  // namespace finsler
