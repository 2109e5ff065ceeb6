#include "finsler/sphere_bundle.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace finsler {
namespace {

constexpr double kAngularStep = 1e-5;

FiberFrame make_frame(const FinslerMetric& metric, const Point& x, const Vec& theta, double w) {
  FiberFrame f;
  f.theta = theta;
  f.F = metric.F(x, theta);
  f.g = metric.fundamental_tensor(x, theta);
  f.g_inv = f.g.inverse();
  f.weight = w * f.g.determinant() / std::pow(f.F, metric.dim());
  return f;
}

Vec unit(const Vec& v) { return v / v.norm(); }

// Orthonormal basis of the tangent plane of S^2 at theta.
std::pair<Vec, Vec> tangent_basis(const Vec& theta) {
  Vec a = std::abs(theta[0]) < 0.9 ? make_vec({1.0, 0.0, 0.0}) : make_vec({0.0, 1.0, 0.0});
  Vec e1 = unit(Vec(a - a.dot(theta) * theta));
  Eigen::Vector3d t3(theta[0], theta[1], theta[2]);
  Eigen::Vector3d e13(e1[0], e1[1], e1[2]);
  Eigen::Vector3d e23 = t3.cross(e13);
  return {e1, make_vec({e23[0], e23[1], e23[2]})};
}

double cross_norm(const Vec& a, const Vec& b) {
  Eigen::Vector3d a3(a[0], a[1], a[2]), b3(b[0], b[1], b[2]);
  return a3.cross(b3).norm();
}

std::vector<Vec> even_directions(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) return {make_vec({1.0}), make_vec({-1.0})};
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / count;
      dirs.push_back(make_vec({std::cos(t), std::sin(t)}));
    }
    return dirs;
  }
  const int m = std::max(4, static_cast<int>(std::sqrt(count / 2.0)));
  for (int i = 0; i < m; ++i) {
    const double polar = std::numbers::pi * (i + 0.5) / m;
    for (int k = 0; k < 2 * m; ++k) {
      const double az = std::numbers::pi * (k + 0.5) / m;
      dirs.push_back(make_vec({std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                               std::cos(polar)}));
    }
  }
  return dirs;
}

// Local refinement of a sampled fiber minimum: golden section in angle (n = 2) or a
// compass search in (polar, azimuth) (n = 3), started from the best sample.
double refine_fiber_min(const std::function<double(const Vec&)>& f, const Vec& start,
                        double start_value, int n, int directions) {
  if (n == 2) {
    auto at = [&](double t) { return f(make_vec({std::cos(t), std::sin(t)})); };
    const double t0 = std::atan2(start[1], start[0]);
    const double dt = 2.0 * std::numbers::pi / directions;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = t0 - dt, b = t0 + dt;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = at(c), fd = at(d);
    while (b - a > 1e-9) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - r * (b - a);
        fc = at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + r * (b - a);
        fd = at(d);
      }
    }
    return std::min({start_value, fc, fd});
  }
  auto sph = [](double polar, double az) {
    return make_vec({std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar)});
  };
  double polar = std::acos(std::clamp(start[2], -1.0, 1.0));
  double az = std::atan2(start[1], start[0]);
  double best = start_value;
  double step = std::numbers::pi / std::max(4.0, std::sqrt(directions / 2.0));
  while (step > 1e-8) {
    bool moved = false;
    for (const auto& [dp, da] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const double v = f(sph(polar + dp * step, az + da * step));
      if (v < best) {
        best = v;
        polar += dp * step;
        az += da * step;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace

std::vector<FiberFrame> fiber_frames(const FinslerMetric& metric, const Vec& x,
                                     const FiberQuadrature& rule) {
  if (rule.dim != metric.dim()) throw ArgumentError("fiber rule dimension does not match metric");
  const Point p(x);
  std::vector<FiberFrame> frames;
  frames.reserve(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) frames.push_back(make_frame(metric, p, rule.nodes[k], rule.weights[k]));
  return frames;
}

double frames_mass(const std::vector<FiberFrame>& frames) {
  std::vector<double> w;
  w.reserve(frames.size());
  for (const auto& f : frames) w.push_back(f.weight);
  return pairwise_sum(w);
}

FiberCache::FiberCache(const FinslerMetric& metric, const FiberQuadrature& rule)
    : metric_(&metric), rule_(&rule) {
  if (rule.dim != metric.dim()) throw ArgumentError("fiber rule dimension does not match metric");
  if (metric.x_independent()) {
    shared_ = fiber_frames(metric, Vec::Zero(metric.dim()), rule);
    shared_mass_ = frames_mass(shared_);
  }
}

const std::vector<FiberFrame>& FiberCache::frames(const Vec& x, std::vector<FiberFrame>& scratch) const {
  if (!shared_.empty()) return shared_;
  scratch = fiber_frames(*metric_, x, *rule_);
  return scratch;
}

double FiberCache::fiber_mass(const Vec& x) const {
  if (!shared_.empty()) return shared_mass_;
  return frames_mass(fiber_frames(*metric_, x, *rule_));
}

TangentVector indicatrix_point(const FinslerMetric& metric, const Point& x, const Vec& theta) {
  if (std::abs(theta.norm() - 1.0) > 1e-12) throw ArgumentError("indicatrix_point: theta must be a unit vector");
  return {x, theta / metric.F(x, theta)};
}

double fiber_quadrature(const FinslerMetric& metric, const Point& x, const SMIntegrand& integrand,
                        const FiberQuadrature& rule) {
  const auto frames = fiber_frames(metric, x.coords, rule);
  std::vector<double> terms(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    terms[k] = frames[k].weight * integrand(x.coords, frames[k].theta);
  }
  return pairwise_sum(terms);
}

double volume_density(const FinslerMetric& metric, const Point& x, const FiberQuadrature& rule) {
  return fiber_quadrature(metric, x, [](const Vec&, const Vec&) { return 1.0; }, rule) /
         sphere_volume(metric.dim());
}

double integrate_M(const FinslerMetric& metric, const Domain& domain, const BaseIntegrand& f,
                   const FiberQuadrature& rule) {
  if (domain.dim() != metric.dim()) throw ArgumentError("domain dimension does not match metric");
  const FiberCache cache(metric, rule);
  const double c = sphere_volume(metric.dim());
  const std::size_t count = domain.node_count();
  std::vector<double> values(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    const Vec x = domain.node(i);
    values[i] = f(x) * cache.fiber_mass(x) / c;
  });
  return base_quadrature_values(domain, values);
}

double integrate_SM(const FinslerMetric& metric, const Domain& domain, const SMIntegrand& f,
                    const FiberQuadrature& rule) {
  if (domain.dim() != metric.dim()) throw ArgumentError("domain dimension does not match metric");
  const FiberCache cache(metric, rule);
  const std::size_t count = domain.node_count();
  std::vector<double> values(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    const Vec x = domain.node(i);
    std::vector<FiberFrame> scratch;
    const auto& frames = cache.frames(x, scratch);
    std::vector<double> terms(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) terms[k] = frames[k].weight * f(x, frames[k].theta);
    values[i] = pairwise_sum(terms);
  });
  return base_quadrature_values(domain, values);
}

double radial_projection_jacobian(const FinslerMetric& metric, const Point& x, const Vec& theta) {
  const int n = metric.dim();
  if (std::abs(theta.norm() - 1.0) > 1e-12) throw ArgumentError("radial_projection_jacobian: theta must be a unit vector");
  auto lift = [&](const Vec& dir) -> Vec { return dir / metric.F(x, dir); };
  const double h = kAngularStep;
  if (n == 1) return 1.0;
  if (n == 2) {
    const double t = std::atan2(theta[1], theta[0]);
    const Vec a = make_vec({std::cos(t + h), std::sin(t + h)});
    const Vec b = make_vec({std::cos(t - h), std::sin(t - h)});
    return (a - b).norm() / (lift(a) - lift(b)).norm();
  }
  const auto [e1, e2] = tangent_basis(theta);
  auto dir = [&](double s1, double s2) { return unit(Vec(theta + s1 * e1 + s2 * e2)); };
  const Vec s1p = dir(h, 0.0), s1m = dir(-h, 0.0), s2p = dir(0.0, h), s2m = dir(0.0, -h);
  const double sphere = cross_norm(s1p - s1m, s2p - s2m);
  const double indicatrix = cross_norm(lift(s1p) - lift(s1m), lift(s2p) - lift(s2m));
  return sphere / indicatrix;
}

double stry_constant(const FinslerMetric& metric, const Domain& domain, int sample_count,
                     int directions) {
  if (sample_count < 100) throw ArgumentError("stry_constant: sample_count must be >= 100");
  const int n = metric.dim();
  const int per_axis = std::max(2, static_cast<int>(std::ceil(std::pow(sample_count, 1.0 / n))));
  int total = 1;
  for (int k = 0; k < n; ++k) total *= per_axis;
  const auto dirs = even_directions(n, directions);
  std::vector<double> inf_at(static_cast<std::size_t>(total), std::numeric_limits<double>::infinity());
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t idx) {
    Vec x(n);
    std::size_t rem = idx;
    for (int k = 0; k < n; ++k) {
      const auto i = static_cast<double>(rem % static_cast<std::size_t>(per_axis));
      rem /= static_cast<std::size_t>(per_axis);
      x[k] = domain.lo()[k] + (domain.hi()[k] - domain.lo()[k]) * i / (per_axis - 1);
    }
    const bool shaped = domain.kind() == DomainKind::Ball || domain.kind() == DomainKind::HalfBall;
    if (shaped && !domain.contains(x)) return;
    const Point p(x);
    if (!metric.in_domain(p)) return;
    auto product = [&](const Vec& theta) {
      return radial_projection_jacobian(metric, p, theta) *
             std::sqrt(metric.fundamental_tensor(p, theta).determinant());
    };
    double worst = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const double v = product(dirs[k]);
      if (v < worst) {
        worst = v;
        best = k;
      }
    }
    inf_at[idx] = n == 1 ? worst : refine_fiber_min(product, dirs[best], worst, n, directions);
  });
  const double inf = *std::min_element(inf_at.begin(), inf_at.end());
  if (!std::isfinite(inf)) throw NumericalError("stry_constant: no admissible samples in the domain");
  return sphere_volume(n) * inf;
}

}  // namespace finsler
