#pragma once

#include "finsler/linalg.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace finsler {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int m);

/// Quadrature on the unit sphere S^{n-1}; weights sum to c_{n-1}.
///
/// n = 1: the two points {+1, -1}. n = 2: uniform periodic trapezoid in angle with
/// `nodes` points. n = 3: Gauss-Legendre in cos(polar) with `nodes` points times a
/// periodic trapezoid of 2 * `nodes` points in azimuth.
struct FiberQuadrature {
  int dim = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;

  static FiberQuadrature make(int n, int nodes);

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] double total_weight() const;
  [[nodiscard]] std::string describe() const;
  /// Nodes per axis as requested at construction.
  int resolution = 0;
};

enum class DomainKind { Box, Torus, Ball, HalfBall };

std::string to_string(DomainKind kind);

/// A single-chart base domain discretized by the composite midpoint rule: one node at
/// the center of each cell of a regular grid over [lo, hi].
///
/// Torus: [0, P_k) with periodic identification. Ball / half-ball: the box
/// [-r, r]^n with nodes outside the ball (or with x^1 > 0) dropped.
class Domain {
 public:
  static Domain box(Vec lo, Vec hi, std::vector<int> resolution);
  static Domain box(Vec lo, Vec hi, int resolution);
  static Domain torus(Vec periods, int resolution);
  static Domain ball(int n, double radius, int resolution);
  static Domain half_ball(int n, double radius, int resolution);

  /// Same grid, quadrature restricted to nodes inside [lo, hi].
  [[nodiscard]] Domain restricted(Vec lo, Vec hi) const;

  [[nodiscard]] int dim() const { return static_cast<int>(lo_.size()); }
  [[nodiscard]] DomainKind kind() const { return kind_; }
  [[nodiscard]] const Vec& lo() const { return lo_; }
  [[nodiscard]] const Vec& hi() const { return hi_; }
  [[nodiscard]] const std::vector<int>& resolution() const { return resolution_; }
  [[nodiscard]] double spacing(int axis) const;
  [[nodiscard]] double cell_volume() const;
  [[nodiscard]] std::size_t node_count() const;
  [[nodiscard]] Vec node(std::size_t index) const;
  [[nodiscard]] std::vector<int> node_multi_index(std::size_t index) const;
  [[nodiscard]] std::size_t flat_index(const std::vector<int>& multi) const;
  /// Quadrature weight of a node: the cell volume, or 0 outside the active region.
  [[nodiscard]] double weight(std::size_t index) const;
  [[nodiscard]] bool contains(const Vec& x) const;
  [[nodiscard]] std::string describe() const;

 private:
  Domain() = default;

  DomainKind kind_ = DomainKind::Box;
  Vec lo_, hi_;
  std::vector<int> resolution_;
  double radius_ = 0.0;
  std::optional<std::pair<Vec, Vec>> active_;
};

/// sum_nodes w_i f(x_i) with parallel evaluation and pairwise reduction. Non-finite
/// values raise NumericalError listing (up to five of) the offending nodes.
double base_quadrature(const Domain& domain, const std::function<double(const Vec&)>& f);

/// Same, on values already evaluated at every node.
double base_quadrature_values(const Domain& domain, const std::vector<double>& values);

}  // namespace finsler
