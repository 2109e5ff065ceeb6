#pragma once

#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"

#include <vector>

namespace finsler {

struct CurveSample {
  double t = 0.0;
  Point point;
  Vec velocity;
};

/// A sampled curve sigma: [a, b] -> M with strictly increasing parameters.
struct Curve {
  std::vector<CurveSample> samples;
  /// Set when integration stopped because the curve left the metric domain.
  bool truncated = false;
};

/// G^i = 1/4 g^{ih} (d^2 F^2 / dy^h dx^j y^j - dF^2 / dx^h). Closed forms are used when
/// the metric provides them; otherwise the x-derivatives are taken by fourth-order
/// central differences.
Vec spray_coefficients(const FinslerMetric& metric, const TangentVector& v);

/// The finite-difference route for G^i regardless of closed forms.
Vec spray_coefficients_numeric(const FinslerMetric& metric, const TangentVector& v);

/// Integrates x'' + 2 G(x, x') = 0 on [0, T] with classical fixed-step RK4.
Curve integrate_geodesic(const FinslerMetric& metric, const TangentVector& start, double T,
                         int steps);

/// L(sigma) = int F(sigma, sigma') dt by composite quadrature over the samples
/// (Simpson on uniform odd-sized samplings, trapezoid otherwise).
double curve_length(const FinslerMetric& metric, const Curve& curve);

/// Length of the straight segment p -> q, by 4-point Gauss-Legendre along the segment.
double segment_length(const FinslerMetric& metric, const Point& p, const Point& q);

/// Sum of segment lengths of a polyline.
double polyline_length(const FinslerMetric& metric, const std::vector<Point>& vertices);

/// Largest relative deviation of F(sigma, sigma') from its initial value.
double speed_drift(const FinslerMetric& metric, const Curve& curve);

}  // namespace finsler
