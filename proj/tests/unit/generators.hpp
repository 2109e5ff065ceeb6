#pragma once

// Fixed-seed generators for the property tests.

#include "finsler/field.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace gen {

using finsler::Vec;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Vec vec(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  // Nonzero vector with |v| in [0.1, 3].
  Vec nonzero(int n) {
    for (;;) {
      Vec v = vec(n, -3.0, 3.0);
      if (v.norm() > 0.1) return v;
    }
  }

  Vec unit(int n) {
    const Vec v = nonzero(n);
    return v / v.norm();
  }

  // Point inside the chart of `metric`, within `extent` of the origin per axis.
  Vec point_for(const finsler::FinslerMetric& metric, double extent = 2.0) {
    const int n = metric.dim();
    if (metric.kind() == finsler::MetricKind::Funk) {
      for (;;) {
        Vec x = vec(n, -0.85, 0.85);
        if (x.norm() < 0.85) return x;
      }
    }
    return vec(n, -extent, extent);
  }

  // a exp(-|x - c|^2 / s^2) cos(k . x + phase), with analytic gradient.
  finsler::ScalarField smooth_field(int n, double extent = 2.0) {
    const Vec c = vec(n, -0.5 * extent, 0.5 * extent);
    const Vec k = vec(n, -2.0, 2.0);
    const double s = uniform(0.4, 1.2) * extent;
    const double phase = uniform(0.0, 2.0 * std::numbers::pi);
    const double a = uniform(0.5, 1.5);
    finsler::ScalarField u;
    u.value = [=](const Vec& x) {
      return a * std::exp(-(x - c).squaredNorm() / (s * s)) * std::cos(k.dot(x) + phase);
    };
    u.gradient = [=](const Vec& x) -> Vec {
      const double e = a * std::exp(-(x - c).squaredNorm() / (s * s));
      const double t = k.dot(x) + phase;
      return Vec(e * (-2.0 * (x - c) / (s * s) * std::cos(t) - k * std::sin(t)));
    };
    u.name = "random";
    return u;
  }

 private:
  std::mt19937_64 engine_;
};

// The zoo in dimension n, with a short label for messages.
inline std::vector<std::pair<std::string, finsler::FinslerMetric>> zoo(int n) {
  using finsler::FinslerMetric;
  Vec b = Vec::Zero(n);
  b[0] = 0.5;
  Vec lam = Vec::Zero(n);
  lam[0] = 0.3;
  if (n > 1) lam[1] = -0.2;
  std::vector<std::pair<std::string, FinslerMetric>> out{
      {"euclidean", FinslerMetric::euclidean(n)},
      {"conformal", FinslerMetric::conformal(n, finsler::ConformalFactor::linear(lam, 0.1))},
      {"randers", FinslerMetric::randers(b)},
      {"funk", FinslerMetric::funk(n)},
  };
  if (n > 1) out.emplace_back("quartic", FinslerMetric::quartic(n, 0.1));
  return out;
}

}  // namespace gen
