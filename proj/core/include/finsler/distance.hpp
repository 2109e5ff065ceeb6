#pragma once

#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"

#include <functional>
#include <string>
#include <vector>

namespace finsler {

enum class DistanceTier { ClosedForm, GridDijkstra, CurveDescent };

std::string to_string(DistanceTier tier);
DistanceTier parse_distance_tier(const std::string& name);

/// How d(x1, x2) is realized.
///
/// grid_dijkstra runs on an axis-aligned grid with square cells, `grid_n` cells along
/// the longest side of the padded bounding box of the two points. Edges connect each
/// node to the primitive lattice offsets of max-norm <= `stencil`; every edge weight is
/// the length of the straight segment, so the result is always an upper bound.
struct DistanceProvider {
  DistanceTier tier = DistanceTier::ClosedForm;
  int grid_n = 64;
  int descent_iters = 50;
  /// 0 selects the default: 4 for n = 2 (48 directions), 1 otherwise (2 / 26 neighbors).
  int stencil = 0;
  /// Padding of the bounding box on each side, as a fraction of its longest extent.
  double padding = 0.5;

  void validate() const;
  [[nodiscard]] std::string describe() const;
};

/// Primitive integer offsets with max-norm <= radius, in a fixed order.
std::vector<std::vector<int>> stencil_offsets(int n, int radius);
int default_stencil(int n);

/// Forward distance d(x1, x2). Not symmetric in general.
double distance(const FinslerMetric& metric, const Point& x1, const Point& x2,
                const DistanceProvider& provider);

/// Distance together with the polyline that realizes it (numeric tiers only).
struct PathResult {
  double length = 0.0;
  std::vector<Point> path;
};

PathResult dijkstra_path(const FinslerMetric& metric, const Point& x1, const Point& x2,
                         const DistanceProvider& provider);

/// Coordinate descent on the interior vertices of a polyline with fixed endpoints.
PathResult descend_polyline(const FinslerMetric& metric, std::vector<Point> seed, int iterations);

/// true iff d(center, x) < radius.
bool forward_ball_indicator(const FinslerMetric& metric, const Point& center, double radius,
                            const Point& x, const DistanceProvider& provider);

/// x -> d(x0, x) with its gradient in x, as used by truncation cutoffs.
struct DistanceFunction {
  std::function<double(const Point&)> value;
  std::function<Vec(const Point&)> gradient;
  std::string provider;
};

/// Closed-form tier: exact values, gradient by fourth-order central differences.
/// grid_dijkstra tier: one single-source run over the box [lo, hi], multilinear
/// interpolation of node distances, gradient by differencing the interpolant.
DistanceFunction make_distance_function(const FinslerMetric& metric, const Point& x0,
                                        const DistanceProvider& provider, const Vec& lo,
                                        const Vec& hi);

}  // namespace finsler
