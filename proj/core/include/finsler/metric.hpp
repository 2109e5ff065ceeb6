#pragma once

#include "finsler/linalg.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace finsler {

enum class MetricKind { Euclidean, ConformalRiemannian, Randers, Funk, QuarticPerturbed };

std::string to_string(MetricKind kind);

/// Conformal exponent lambda(x) of F = e^{lambda(x)} |y|, with its gradient.
struct ConformalFactor {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  bool constant = false;
  std::string label;

  /// lambda(x) = offset + coeffs . x
  static ConformalFactor linear(Vec coeffs, double offset = 0.0);
  static ConformalFactor constant_value(int n, double offset);
};

/// Riemannian part a (SPD) and one-form b of F = sqrt(a(y,y)) + b(y).
struct RandersData {
  std::function<Mat(const Vec&)> a;
  std::function<Vec(const Vec&)> b;
  bool constant = false;
  std::string label;
};

/// A Finsler structure on a single global chart of R^n, n in {1, 2, 3}.
///
/// Instances are immutable and cheap to copy; all evaluation is pure.
class FinslerMetric {
 public:
  static FinslerMetric euclidean(int n);
  static FinslerMetric conformal(int n, ConformalFactor factor);
  /// Constant-coefficient Randers metric; requires |b|_a < 1.
  static FinslerMetric randers(Mat a, Vec b);
  static FinslerMetric randers(Vec b);
  /// Randers metric with coefficient fields. Positivity (sup |b|_a < 1) is checked on a
  /// sampling grid over [check_lo, check_hi].
  static FinslerMetric randers_field(int n, std::function<Mat(const Vec&)> a,
                                     std::function<Vec(const Vec&)> b, const Vec& check_lo,
                                     const Vec& check_hi, std::string label = "field");
  /// Funk metric of the open unit ball.
  static FinslerMetric funk(int n);
  /// F^2 = |y|^2 + eps (y^1)^4 / |y|^2, eps in [0, 0.2].
  static FinslerMetric quartic(int n, double eps);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] MetricKind kind() const { return kind_; }
  [[nodiscard]] bool reversed() const { return reversed_; }
  /// F(x,-y) == F(x,y) identically.
  [[nodiscard]] bool reversible() const;
  [[nodiscard]] bool riemannian() const;
  /// F does not depend on x (a Minkowski norm); fiber data may be cached per direction.
  [[nodiscard]] bool x_independent() const;
  [[nodiscard]] bool in_domain(const Point& x) const;
  /// Throws DomainError when x is outside the chart.
  void require_domain(const Point& x) const;

  [[nodiscard]] double F(const Point& x, const Vec& y) const;
  [[nodiscard]] Mat fundamental_tensor(const Point& x, const Vec& y) const;
  /// Gradient of F in y (the Legendre covector l_i = F_{y^i}).
  [[nodiscard]] Vec dF_dy(const Point& x, const Vec& y) const;

  /// Spray coefficients from a closed formula when the zoo member has one.
  [[nodiscard]] std::optional<Vec> closed_form_spray(const Point& x, const Vec& y) const;
  [[nodiscard]] bool has_closed_form_distance() const;
  /// Forward distance d(x1, x2); only valid when has_closed_form_distance().
  [[nodiscard]] double closed_form_distance(const Point& x1, const Point& x2) const;

  /// F(x, -y) as a new metric.
  [[nodiscard]] FinslerMetric reversed_metric() const;

  /// Stable one-line description, e.g. "randers(b=[0.5,0])".
  [[nodiscard]] std::string describe() const;

  /// Funk guard: queries require |x| <= 1 - kFunkMargin.
  static constexpr double kFunkMargin = 1e-9;

 private:
  FinslerMetric() = default;

  [[nodiscard]] double F_unreversed(const Point& x, const Vec& y) const;
  [[nodiscard]] Mat tensor_unreversed(const Point& x, const Vec& y) const;
  [[nodiscard]] Vec dF_unreversed(const Point& x, const Vec& y) const;
  [[nodiscard]] std::optional<Vec> spray_unreversed(const Point& x, const Vec& y) const;
  [[nodiscard]] double distance_unreversed(const Point& x1, const Point& x2) const;

  int dim_ = 0;
  MetricKind kind_ = MetricKind::Euclidean;
  bool reversed_ = false;
  double eps_ = 0.0;
  std::shared_ptr<const ConformalFactor> conformal_;
  std::shared_ptr<const RandersData> randers_;
};

/// Central fourth-order finite-difference Hessian of F^2/2 in y.
Mat fd_fundamental_tensor(const std::function<double(const Vec&)>& F_at_x, const Vec& y);

/// Throws MetricValidityError unless g is symmetric positive definite.
void require_spd(const Mat& g, const char* context);

// Free-function surface of the metric module.

double eval_F(const FinslerMetric& metric, const TangentVector& v);
Mat fundamental_tensor(const FinslerMetric& metric, const TangentVector& v);
FinslerMetric reverse_metric(const FinslerMetric& metric);

/// sup over samples and directions of |F(x,y) - F(x,-y)| with y normalized so that
/// F(x,y) + F(x,-y) = 2. Zero exactly for reversible metrics; 2|b|_a for Randers.
double reversibility_defect(const FinslerMetric& metric, std::span<const Point> samples,
                            int directions = 720);

struct HomogeneityReport {
  double max_relative_deviation = 0.0;
  std::size_t evaluations = 0;
};

HomogeneityReport check_homogeneity(const FinslerMetric& metric,
                                    std::span<const TangentVector> samples,
                                    std::span<const double> lambdas);

/// Smallest eigenvalue and worst asymmetry of g over the samples.
struct TensorReport {
  double min_eigenvalue = 0.0;
  double max_asymmetry = 0.0;
};

TensorReport check_fundamental_tensor(const FinslerMetric& metric,
                                      std::span<const TangentVector> samples);

}  // namespace finsler
