#include "finsler/spray.hpp"

#include "finsler/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace finsler {
namespace {

constexpr std::array<double, 4> kGLNodes = {-0.8611363115940526, -0.3399810435848563,
                                            0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGLWeights = {0.3478548451374538, 0.6521451548625461,
                                              0.6521451548625461, 0.3478548451374538};

// Fourth-order central derivative of s -> f(s) at 0.
template <typename Fn>
auto central4(Fn&& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

// Largest step such that x + s*d stays in the domain for |s| <= 2 step.
double safe_step(const FinslerMetric& metric, const Point& x, const Vec& d, double wanted) {
  double h = wanted;
  for (int i = 0; i < 40; ++i) {
    if (metric.in_domain(Point(Vec(x.coords + 2.0 * h * d))) &&
        metric.in_domain(Point(Vec(x.coords - 2.0 * h * d)))) {
      return h;
    }
    h *= 0.5;
  }
  throw DomainError("spray: point too close to the domain boundary for differencing");
}

}  // namespace

Vec spray_coefficients_numeric(const FinslerMetric& metric, const TangentVector& v) {
  const int n = metric.dim();
  const Point& x = v.base;
  const Vec& y = v.components;
  if (y.isZero(0.0)) throw ArgumentError("spray requires y != 0");
  const Mat g = metric.fundamental_tensor(x, y);

  auto F2 = [&](const Vec& xc, const Vec& yc) {
    const double f = metric.F(Point(xc), yc);
    return f * f;
  };
  // dF^2/dy^h = 2 F F_{y^h}
  auto dF2_dy = [&](const Vec& xc) -> Vec {
    const Point p(xc);
    return 2.0 * metric.F(p, y) * metric.dF_dy(p, y);
  };

  // Directional derivative of dF^2/dy along y in x: sum_j d^2F^2/dy^h dx^j y^j.
  const double hs = safe_step(metric, x, y, 1e-3 / std::max(1.0, y.norm()));
  const Vec mixed = central4([&](double s) { return dF2_dy(x.coords + s * y); }, hs);

  Vec dx(n);
  for (int h = 0; h < n; ++h) {
    const Vec e = Vec::Unit(n, h);
    const double step = safe_step(metric, x, e, 1e-3);
    dx[h] = central4([&](double s) { return F2(x.coords + s * e, y); }, step);
  }
  return 0.25 * g.ldlt().solve(mixed - dx);
}

Vec spray_coefficients(const FinslerMetric& metric, const TangentVector& v) {
  if (v.components.isZero(0.0)) throw ArgumentError("spray requires y != 0");
  if (auto closed = metric.closed_form_spray(v.base, v.components)) {
    // Validity of g is part of the contract even when G is known in closed form.
    (void)metric.fundamental_tensor(v.base, v.components);
    return *closed;
  }
  return spray_coefficients_numeric(metric, v);
}

Curve integrate_geodesic(const FinslerMetric& metric, const TangentVector& start, double T,
                         int steps) {
  if (steps < 16) throw ArgumentError("integrate_geodesic: steps must be >= 16");
  if (start.components.isZero(0.0)) throw ArgumentError("integrate_geodesic: zero start velocity");
  if (!(T > 0.0)) throw ArgumentError("integrate_geodesic: T must be positive");
  metric.require_domain(start.base);

  const double dt = T / steps;
  Curve curve;
  curve.samples.reserve(static_cast<std::size_t>(steps) + 1);
  Vec x = start.base.coords;
  Vec v = start.components;
  curve.samples.push_back({0.0, Point(x), v});

  auto accel = [&](const Vec& xc, const Vec& vc) -> Vec {
    return -2.0 * spray_coefficients(metric, {Point(xc), vc});
  };

  for (int k = 0; k < steps; ++k) {
    try {
      const Vec k1x = v;
      const Vec k1v = accel(x, v);
      const Vec x2 = x + 0.5 * dt * k1x, v2 = v + 0.5 * dt * k1v;
      const Vec k2v = accel(x2, v2);
      const Vec x3 = x + 0.5 * dt * v2, v3 = v + 0.5 * dt * k2v;
      const Vec k3v = accel(x3, v3);
      const Vec x4 = x + dt * v3, v4 = v + dt * k3v;
      const Vec k4v = accel(x4, v4);
      const Vec xn = x + dt / 6.0 * (k1x + 2.0 * v2 + 2.0 * v3 + v4);
      const Vec vn = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!metric.in_domain(Point(xn)) || !vn.allFinite()) {
        curve.truncated = true;
        break;
      }
      x = xn;
      v = vn;
    } catch (const DomainError&) {
      curve.truncated = true;
      break;
    }
    curve.samples.push_back({(k + 1) * dt, Point(x), v});
  }
  return curve;
}

double curve_length(const FinslerMetric& metric, const Curve& curve) {
  const auto& s = curve.samples;
  if (s.size() < 2) throw ArgumentError("curve_length: need at least 2 samples");
  std::vector<double> speed(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && !(s[i].t > s[i - 1].t)) throw ArgumentError("curve_length: parameters not increasing");
    speed[i] = metric.F(s[i].point, s[i].velocity);
  }
  const std::size_t intervals = s.size() - 1;
  const double h0 = s[1].t - s[0].t;
  bool uniform = intervals % 2 == 0;
  for (std::size_t i = 1; uniform && i < s.size(); ++i) {
    uniform = std::abs((s[i].t - s[i - 1].t) - h0) <= 1e-12 * std::max(1.0, std::abs(h0));
  }
  double total = 0.0;
  if (uniform) {
    for (std::size_t i = 0; i + 2 < s.size(); i += 2) {
      total += (speed[i] + 4.0 * speed[i + 1] + speed[i + 2]) * h0 / 3.0;
    }
  } else {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      total += 0.5 * (speed[i] + speed[i + 1]) * (s[i + 1].t - s[i].t);
    }
  }
  return total;
}

double segment_length(const FinslerMetric& metric, const Point& p, const Point& q) {
  const Vec delta = q.coords - p.coords;
  if (delta.isZero(0.0)) return 0.0;
  if (metric.x_independent()) return metric.F(p, delta);
  double total = 0.0;
  for (std::size_t k = 0; k < kGLNodes.size(); ++k) {
    const double s = 0.5 * (kGLNodes[k] + 1.0);
    total += 0.5 * kGLWeights[k] * metric.F(Point(Vec(p.coords + s * delta)), delta);
  }
  return total;
}

double polyline_length(const FinslerMetric& metric, const std::vector<Point>& vertices) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    total += segment_length(metric, vertices[i], vertices[i + 1]);
  }
  return total;
}

double speed_drift(const FinslerMetric& metric, const Curve& curve) {
  if (curve.samples.empty()) return 0.0;
  const double f0 = metric.F(curve.samples.front().point, curve.samples.front().velocity);
  double worst = 0.0;
  for (const auto& s : curve.samples) {
    worst = std::max(worst, std::abs(metric.F(s.point, s.velocity) - f0) / f0);
  }
  return worst;
}

}  // namespace finsler
