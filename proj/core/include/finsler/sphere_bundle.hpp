#pragma once

#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/quadrature.hpp"

#include <functional>
#include <vector>

namespace finsler {

/// Integrand on SM in the coordinates (x, theta), theta in S^{n-1}; the point of SM is
/// (x, theta / F(x, theta)).
using SMIntegrand = std::function<double(const Vec& x, const Vec& theta)>;
using BaseIntegrand = std::function<double(const Vec& x)>;

/// Everything the fiber quadrature needs at one node (x, theta_k).
struct FiberFrame {
  Vec theta;
  double F = 0.0;
  Mat g;
  Mat g_inv;
  /// w_k det(g) / F^n: the node's weight in the chart form of dV_SM.
  double weight = 0.0;
};

/// Frames at every fiber node over x.
std::vector<FiberFrame> fiber_frames(const FinslerMetric& metric, const Vec& x,
                                     const FiberQuadrature& rule);

/// Fiber data over a base domain. Metrics that do not depend on x share one set of
/// frames; otherwise frames are built on demand per base point.
class FiberCache {
 public:
  FiberCache(const FinslerMetric& metric, const FiberQuadrature& rule);

  /// Frames over x; returns the shared set or fills `scratch`.
  const std::vector<FiberFrame>& frames(const Vec& x, std::vector<FiberFrame>& scratch) const;
  /// sum_k w_k det g / F^n over x (= c_{n-1} sigma_F(x)).
  [[nodiscard]] double fiber_mass(const Vec& x) const;

 private:
  const FinslerMetric* metric_;
  const FiberQuadrature* rule_;
  std::vector<FiberFrame> shared_;
  double shared_mass_ = 0.0;
};

/// y = theta / F(x, theta), the point of the indicatrix S_xM over theta.
TangentVector indicatrix_point(const FinslerMetric& metric, const Point& x, const Vec& theta);

/// int_{S^{n-1}} integrand(x, theta) det(g) / F^n dsigma.
double fiber_quadrature(const FinslerMetric& metric, const Point& x, const SMIntegrand& integrand,
                        const FiberQuadrature& rule);

/// sigma_F(x) = (1 / c_{n-1}) int_{S^{n-1}} det(g) / F^n dsigma: density of dV_F w.r.t. dx.
double volume_density(const FinslerMetric& metric, const Point& x, const FiberQuadrature& rule);

/// int_M f dV_F.
double integrate_M(const FinslerMetric& metric, const Domain& domain, const BaseIntegrand& f,
                   const FiberQuadrature& rule);

/// int_SM f dV_SM via the fiber integration formula.
double integrate_SM(const FinslerMetric& metric, const Domain& domain, const SMIntegrand& f,
                    const FiberQuadrature& rule);

/// det J(A) of the radial projection S_xM -> S^{n-1} at the indicatrix point over theta:
/// the ratio of the sphere's area element to the indicatrix's, by central chord
/// differences on the angular parameterization with step 1e-5.
double radial_projection_jacobian(const FinslerMetric& metric, const Point& x, const Vec& theta);

/// c_{n-1} * inf over sampled (x, theta) of det J(A) sqrt(det g). Base samples form a
/// regular grid with ~sample_count points spanning the domain (endpoints included);
/// fiber samples are `directions` evenly spread directions, and the smallest sample over
/// each base point is refined locally in angle.
double stry_constant(const FinslerMetric& metric, const Domain& domain, int sample_count,
                     int directions = 256);

}  // namespace finsler
