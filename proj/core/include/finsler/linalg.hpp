#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace finsler {

inline constexpr int kMaxDim = 3;

/// Coordinate vector of dimension n <= 3 (stack allocated).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
/// n x n matrix with n <= 3 (stack allocated).
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// A point of the base manifold in the single global chart of a metric.
struct Point {
  Vec coords;

  Point() = default;
  explicit Point(Vec c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size())) {
    Eigen::Index i = 0;
    for (double v : c) coords[i++] = v;
  }

  [[nodiscard]] int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[i]; }
};

/// A vector y in the tangent space at `base`.
struct TangentVector {
  Point base;
  Vec components;

  [[nodiscard]] int dim() const { return base.dim(); }
};

inline Vec make_vec(std::initializer_list<double> c) {
  Vec v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double x : c) v[i++] = x;
  return v;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Volume of the unit Euclidean sphere S^{n-1}: c_0 = 2, c_1 = 2 pi, c_2 = 4 pi.
inline double sphere_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  }
}

}  // namespace finsler
