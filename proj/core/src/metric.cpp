#include "finsler/metric.hpp"

#include "finsler/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace finsler {
namespace {

void require_dim(int n) {
  if (n < 1 || n > kMaxDim) {
    throw UnsupportedError("metric dimension " + std::to_string(n) + " not in {1,2,3}");
  }
}

void require_same_dim(int n, const Vec& v, const char* what) {
  if (v.size() != n) {
    throw ArgumentError(std::string(what) + " has dimension " + std::to_string(v.size()) +
                        ", metric has dimension " + std::to_string(n));
  }
}

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(12);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

std::string format_mat(const Mat& a) {
  std::ostringstream os;
  os.precision(12);
  os << '[';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) os << (i + j ? "," : "") << a(i, j);
  }
  os << ']';
  return os.str();
}

double randers_alpha(const Mat& a, const Vec& y) { return std::sqrt(y.dot(a * y)); }

// g_ij = (F/alpha)(a_ij - yh_i yh_j) + l_i l_j with yh = a y / alpha, l = yh + b.
Mat randers_tensor(const Mat& a, const Vec& b, const Vec& y) {
  const Vec ay = a * y;
  const double alpha = std::sqrt(y.dot(ay));
  const double F = alpha + b.dot(y);
  const Vec yh = ay / alpha;
  const Vec l = yh + b;
  return (F / alpha) * (a - yh * yh.transpose()) + l * l.transpose();
}

// Funk metric of the unit ball written as a Randers metric with x-dependent data.
void funk_data(const Vec& x, Mat& a, Vec& b) {
  const int n = static_cast<int>(x.size());
  const double lam = 1.0 - x.squaredNorm();
  a = (lam * Mat::Identity(n, n) + x * x.transpose()) / (lam * lam);
  b = x / lam;
}

double funk_F(const Vec& x, const Vec& y) {
  const double lam = 1.0 - x.squaredNorm();
  const double xy = x.dot(y);
  return (std::sqrt(lam * y.squaredNorm() + xy * xy) + xy) / lam;
}

double quartic_F(double eps, const Vec& y) {
  const double r2 = y.squaredNorm();
  if (r2 == 0.0) return 0.0;
  const double y1 = y[0];
  return std::sqrt(r2 + eps * y1 * y1 * y1 * y1 / r2);
}

Vec quartic_dF(double eps, const Vec& y) {
  const double r2 = y.squaredNorm();
  const double y1 = y[0];
  const double F = quartic_F(eps, y);
  // d(F^2)/dy = 2y + eps (4 y1^3 e1 / r2 - 2 y1^4 y / r2^2)
  Vec d = 2.0 * y - eps * 2.0 * y1 * y1 * y1 * y1 / (r2 * r2) * y;
  d[0] += eps * 4.0 * y1 * y1 * y1 / r2;
  return d / (2.0 * F);
}

}  // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::ConformalRiemannian: return "conformal";
    case MetricKind::Randers: return "randers";
    case MetricKind::Funk: return "funk";
    case MetricKind::QuarticPerturbed: return "quartic";
  }
  return "unknown";
}

ConformalFactor ConformalFactor::linear(Vec coeffs, double offset) {
  ConformalFactor f;
  f.value = [coeffs, offset](const Vec& x) { return offset + coeffs.dot(x); };
  f.gradient = [coeffs](const Vec&) { return coeffs; };
  f.constant = coeffs.isZero(0.0);
  std::ostringstream os;
  os.precision(12);
  os << "linear(c=" << format_vec(coeffs) << ",c0=" << offset << ")";
  f.label = os.str();
  return f;
}

ConformalFactor ConformalFactor::constant_value(int n, double offset) {
  return linear(Vec::Zero(n), offset);
}

FinslerMetric FinslerMetric::euclidean(int n) {
  require_dim(n);
  FinslerMetric m;
  m.dim_ = n;
  m.kind_ = MetricKind::Euclidean;
  return m;
}

FinslerMetric FinslerMetric::conformal(int n, ConformalFactor factor) {
  require_dim(n);
  if (!factor.value || !factor.gradient) throw ArgumentError("conformal factor needs value and gradient");
  FinslerMetric m;
  m.dim_ = n;
  m.kind_ = MetricKind::ConformalRiemannian;
  m.conformal_ = std::make_shared<const ConformalFactor>(std::move(factor));
  return m;
}

FinslerMetric FinslerMetric::randers(Mat a, Vec b) {
  const int n = static_cast<int>(b.size());
  require_dim(n);
  if (a.rows() != n || a.cols() != n) throw ArgumentError("randers: a must be n x n");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-14) throw ArgumentError("randers: a not symmetric");
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw MetricValidityError("randers: a is not positive definite");
  const double bnorm = std::sqrt(b.dot(a.inverse() * b));
  if (!(bnorm < 1.0)) {
    std::ostringstream os;
    os << "randers: |b|_a = " << bnorm << " must be < 1";
    throw MetricValidityError(os.str());
  }
  FinslerMetric m;
  m.dim_ = n;
  m.kind_ = MetricKind::Randers;
  auto data = std::make_shared<RandersData>();
  data->a = [a](const Vec&) { return a; };
  data->b = [b](const Vec&) { return b; };
  data->constant = true;
  data->label = a == Mat::Identity(n, n) ? "b=" + format_vec(b) : "a=" + format_mat(a) + ",b=" + format_vec(b);
  m.randers_ = std::move(data);
  return m;
}

FinslerMetric FinslerMetric::randers(Vec b) {
  const auto n = b.size();
  return randers(Mat::Identity(n, n), std::move(b));
}

FinslerMetric FinslerMetric::randers_field(int n, std::function<Mat(const Vec&)> a,
                                           std::function<Vec(const Vec&)> b, const Vec& check_lo,
                                           const Vec& check_hi, std::string label) {
  require_dim(n);
  require_same_dim(n, check_lo, "check_lo");
  require_same_dim(n, check_hi, "check_hi");
  constexpr int kPerAxis = 11;
  int total = 1;
  for (int k = 0; k < n; ++k) total *= kPerAxis;
  double worst = 0.0;
  for (int idx = 0; idx < total; ++idx) {
    Vec x(n);
    int rem = idx;
    for (int k = 0; k < n; ++k) {
      const int i = rem % kPerAxis;
      rem /= kPerAxis;
      x[k] = check_lo[k] + (check_hi[k] - check_lo[k]) * i / (kPerAxis - 1);
    }
    const Mat ax = a(x);
    Eigen::LLT<Mat> llt(ax);
    if (llt.info() != Eigen::Success) throw MetricValidityError("randers field: a(x) not SPD");
    const Vec bx = b(x);
    worst = std::max(worst, std::sqrt(bx.dot(llt.solve(bx))));
  }
  if (!(worst < 1.0)) {
    std::ostringstream os;
    os << "randers field: sup |b|_a = " << worst << " must be < 1";
    throw MetricValidityError(os.str());
  }
  FinslerMetric m;
  m.dim_ = n;
  m.kind_ = MetricKind::Randers;
  auto data = std::make_shared<RandersData>();
  data->a = std::move(a);
  data->b = std::move(b);
  data->constant = false;
  data->label = std::move(label);
  m.randers_ = std::move(data);
  return m;
}

FinslerMetric FinslerMetric::funk(int n) {
  require_dim(n);
  FinslerMetric m;
  m.dim_ = n;
  m.kind_ = MetricKind::Funk;
  return m;
}

FinslerMetric FinslerMetric::quartic(int n, double eps) {
  require_dim(n);
  if (!(eps >= 0.0 && eps <= 0.2)) {
    throw ArgumentError("quartic: epsilon must lie in [0, 0.2]");
  }
  FinslerMetric m;
  m.dim_ = n;
  m.kind_ = MetricKind::QuarticPerturbed;
  m.eps_ = eps;
  return m;
}

bool FinslerMetric::reversible() const {
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::ConformalRiemannian:
    case MetricKind::QuarticPerturbed:
      return true;
    case MetricKind::Randers:
      if (randers_->constant) return randers_->b(Vec::Zero(dim_)).isZero(0.0);
      return false;
    case MetricKind::Funk:
      return false;
  }
  return false;
}

bool FinslerMetric::riemannian() const {
  return kind_ == MetricKind::Euclidean || kind_ == MetricKind::ConformalRiemannian ||
         (kind_ == MetricKind::QuarticPerturbed && (eps_ == 0.0 || dim_ == 1)) ||
         (kind_ == MetricKind::Randers && reversible());
}

bool FinslerMetric::x_independent() const {
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::QuarticPerturbed:
      return true;
    case MetricKind::ConformalRiemannian:
      return conformal_->constant;
    case MetricKind::Randers:
      return randers_->constant;
    case MetricKind::Funk:
      return false;
  }
  return false;
}

bool FinslerMetric::in_domain(const Point& x) const {
  if (x.dim() != dim_ || !x.coords.allFinite()) return false;
  if (kind_ == MetricKind::Funk) return x.coords.norm() <= 1.0 - kFunkMargin;
  return true;
}

void FinslerMetric::require_domain(const Point& x) const {
  if (x.dim() != dim_) {
    throw ArgumentError("point has dimension " + std::to_string(x.dim()) + ", metric has " +
                        std::to_string(dim_));
  }
  if (!in_domain(x)) {
    std::ostringstream os;
    os << describe() << ": point " << format_vec(x.coords) << " outside metric domain";
    throw DomainError(os.str());
  }
}

double FinslerMetric::F_unreversed(const Point& x, const Vec& y) const {
  switch (kind_) {
    case MetricKind::Euclidean:
      return y.norm();
    case MetricKind::ConformalRiemannian:
      return std::exp(conformal_->value(x.coords)) * y.norm();
    case MetricKind::Randers: {
      const Mat a = randers_->a(x.coords);
      return randers_alpha(a, y) + randers_->b(x.coords).dot(y);
    }
    case MetricKind::Funk:
      return funk_F(x.coords, y);
    case MetricKind::QuarticPerturbed:
      return quartic_F(eps_, y);
  }
  return 0.0;
}

double FinslerMetric::F(const Point& x, const Vec& y) const {
  require_domain(x);
  require_same_dim(dim_, y, "tangent vector");
  return reversed_ ? F_unreversed(x, -y) : F_unreversed(x, y);
}

Mat FinslerMetric::tensor_unreversed(const Point& x, const Vec& y) const {
  switch (kind_) {
    case MetricKind::Euclidean:
      return Mat::Identity(dim_, dim_);
    case MetricKind::ConformalRiemannian:
      return std::exp(2.0 * conformal_->value(x.coords)) * Mat::Identity(dim_, dim_);
    case MetricKind::Randers:
      return randers_tensor(randers_->a(x.coords), randers_->b(x.coords), y);
    case MetricKind::Funk: {
      Mat a;
      Vec b;
      funk_data(x.coords, a, b);
      return randers_tensor(a, b, y);
    }
    case MetricKind::QuarticPerturbed: {
      const double eps = eps_;
      return fd_fundamental_tensor([eps](const Vec& v) { return quartic_F(eps, v); }, y);
    }
  }
  return Mat();
}

Mat FinslerMetric::fundamental_tensor(const Point& x, const Vec& y) const {
  require_domain(x);
  require_same_dim(dim_, y, "tangent vector");
  if (y.isZero(0.0)) throw ArgumentError("fundamental tensor requires y != 0");
  Mat g = reversed_ ? tensor_unreversed(x, -y) : tensor_unreversed(x, y);
  require_spd(g, "fundamental tensor");
  return g;
}

Vec FinslerMetric::dF_unreversed(const Point& x, const Vec& y) const {
  switch (kind_) {
    case MetricKind::Euclidean:
      return y / y.norm();
    case MetricKind::ConformalRiemannian:
      return std::exp(conformal_->value(x.coords)) * y / y.norm();
    case MetricKind::Randers: {
      const Mat a = randers_->a(x.coords);
      return a * y / randers_alpha(a, y) + randers_->b(x.coords);
    }
    case MetricKind::Funk: {
      Mat a;
      Vec b;
      funk_data(x.coords, a, b);
      return a * y / randers_alpha(a, y) + b;
    }
    case MetricKind::QuarticPerturbed:
      return quartic_dF(eps_, y);
  }
  return Vec();
}

Vec FinslerMetric::dF_dy(const Point& x, const Vec& y) const {
  require_domain(x);
  require_same_dim(dim_, y, "tangent vector");
  if (y.isZero(0.0)) throw ArgumentError("dF/dy requires y != 0");
  return reversed_ ? Vec(-dF_unreversed(x, -y)) : dF_unreversed(x, y);
}

std::optional<Vec> FinslerMetric::spray_unreversed(const Point& x, const Vec& y) const {
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::QuarticPerturbed:
      return Vec::Zero(dim_);
    case MetricKind::ConformalRiemannian: {
      // Levi-Civita spray of e^{2 lambda} delta: G = y (dlambda . y) - |y|^2 dlambda / 2.
      const Vec dl = conformal_->gradient(x.coords);
      return Vec(y * dl.dot(y) - 0.5 * y.squaredNorm() * dl);
    }
    case MetricKind::Randers:
      if (randers_->constant) return Vec::Zero(dim_);
      return std::nullopt;
    case MetricKind::Funk:
      // Projectively flat with projective factor F/2.
      return Vec(0.5 * funk_F(x.coords, y) * y);
  }
  return std::nullopt;
}

std::optional<Vec> FinslerMetric::closed_form_spray(const Point& x, const Vec& y) const {
  require_domain(x);
  require_same_dim(dim_, y, "tangent vector");
  if (!reversed_) return spray_unreversed(x, y);
  // G~(x, y) = G(x, -y) since G is 2-homogeneous in y.
  return spray_unreversed(x, -y);
}

bool FinslerMetric::has_closed_form_distance() const {
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::QuarticPerturbed:
    case MetricKind::Funk:
      return true;
    case MetricKind::ConformalRiemannian:
      return conformal_->constant;
    case MetricKind::Randers:
      return randers_->constant;
  }
  return false;
}

double FinslerMetric::distance_unreversed(const Point& x1, const Point& x2) const {
  const Vec delta = x2.coords - x1.coords;
  switch (kind_) {
    case MetricKind::Euclidean:
      return delta.norm();
    case MetricKind::QuarticPerturbed:
      return quartic_F(eps_, delta);
    case MetricKind::ConformalRiemannian:
      return std::exp(conformal_->value(x1.coords)) * delta.norm();
    case MetricKind::Randers: {
      const Vec zero = Vec::Zero(dim_);
      return randers_alpha(randers_->a(zero), delta) + randers_->b(zero).dot(delta);
    }
    case MetricKind::Funk: {
      // ln(t / (t - |x2 - x1|)), t = distance from x1 to the boundary along the ray through x2.
      const double len = delta.norm();
      if (len == 0.0) return 0.0;
      const Vec u = delta / len;
      const double xu = x1.coords.dot(u);
      const double t = -xu + std::sqrt(xu * xu - x1.coords.squaredNorm() + 1.0);
      return std::log(t / (t - len));
    }
  }
  return 0.0;
}

double FinslerMetric::closed_form_distance(const Point& x1, const Point& x2) const {
  if (!has_closed_form_distance()) {
    throw UnsupportedError(describe() + " has no closed-form distance");
  }
  require_domain(x1);
  require_domain(x2);
  return reversed_ ? distance_unreversed(x2, x1) : distance_unreversed(x1, x2);
}

FinslerMetric FinslerMetric::reversed_metric() const {
  if (kind_ == MetricKind::Randers && randers_->constant) {
    const Vec zero = Vec::Zero(dim_);
    FinslerMetric m = randers(randers_->a(zero), -randers_->b(zero));
    m.reversed_ = false;
    return m;
  }
  FinslerMetric m = *this;
  if (!reversible()) m.reversed_ = !reversed_;
  return m;
}

std::string FinslerMetric::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind_) {
    case MetricKind::Euclidean: os << "euclidean"; break;
    case MetricKind::ConformalRiemannian: os << "conformal(" << conformal_->label << ")"; break;
    case MetricKind::Randers: os << "randers(" << randers_->label << ")"; break;
    case MetricKind::Funk: os << "funk"; break;
    case MetricKind::QuarticPerturbed: os << "quartic(eps=" << eps_ << ")"; break;
  }
  os << "/n=" << dim_;
  if (reversed_) os << "/reversed";
  return os.str();
}

Mat fd_fundamental_tensor(const std::function<double(const Vec&)>& F_at_x, const Vec& y) {
  const int n = static_cast<int>(y.size());
  // g is 0-homogeneous: evaluate at the Euclidean unit direction with a fixed step.
  const Vec u = y / y.norm();
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0);
  auto half_sq = [&](const Vec& v) {
    const double f = F_at_x(v);
    return 0.5 * f * f;
  };
  const double f0 = half_sq(u);
  // Fourth-order second derivative along direction d.
  auto second = [&](const Vec& d) {
    const double fp1 = half_sq(u + h * d), fm1 = half_sq(u - h * d);
    const double fp2 = half_sq(u + 2.0 * h * d), fm2 = half_sq(u - 2.0 * h * d);
    return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  };
  Mat g(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec ei = Vec::Unit(n, i);
    g(i, i) = second(ei);
    for (int j = 0; j < i; ++j) {
      const Vec ej = Vec::Unit(n, j);
      const double mixed = 0.25 * (second(ei + ej) - second(ei - ej));
      g(i, j) = mixed;
      g(j, i) = mixed;
    }
  }
  return g;
}

void require_spd(const Mat& g, const char* context) {
  if (!g.allFinite()) throw MetricValidityError(std::string(context) + ": non-finite entries");
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw MetricValidityError(std::string(context) + ": not positive definite");
  }
}

double eval_F(const FinslerMetric& metric, const TangentVector& v) {
  if (!v.components.allFinite()) throw ArgumentError("eval_F: non-finite tangent vector");
  return metric.F(v.base, v.components);
}

Mat fundamental_tensor(const FinslerMetric& metric, const TangentVector& v) {
  return metric.fundamental_tensor(v.base, v.components);
}

FinslerMetric reverse_metric(const FinslerMetric& metric) { return metric.reversed_metric(); }

double reversibility_defect(const FinslerMetric& metric, std::span<const Point> samples,
                            int directions) {
  if (samples.empty()) throw ArgumentError("reversibility_defect: empty sample set");
  const int n = metric.dim();
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(make_vec({1.0}));
  } else if (n == 2) {
    for (int k = 0; k < directions; ++k) {
      const double t = std::numbers::pi * k / directions;  // half circle suffices
      dirs.push_back(make_vec({std::cos(t), std::sin(t)}));
    }
  } else {
    const int m = std::max(8, static_cast<int>(std::sqrt(static_cast<double>(directions))));
    for (int i = 0; i <= m; ++i) {
      const double polar = std::numbers::pi * i / m;
      for (int k = 0; k < 2 * m; ++k) {
        const double az = std::numbers::pi * k / m;
        dirs.push_back(make_vec({std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                                 std::cos(polar)}));
      }
    }
  }
  double worst = 0.0;
  for (const Point& x : samples) {
    for (const Vec& d : dirs) {
      const double fp = metric.F(x, d);
      const double fm = metric.F(x, -d);
      worst = std::max(worst, std::abs(fp - fm) / (0.5 * (fp + fm)));
    }
  }
  return worst;
}

HomogeneityReport check_homogeneity(const FinslerMetric& metric,
                                    std::span<const TangentVector> samples,
                                    std::span<const double> lambdas) {
  HomogeneityReport report;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw ArgumentError("check_homogeneity: lambdas must be positive");
  }
  for (const TangentVector& v : samples) {
    const double base = metric.F(v.base, v.components);
    for (double lam : lambdas) {
      const double scaled = metric.F(v.base, lam * v.components);
      const double ref = lam * base;
      const double dev = ref == 0.0 ? std::abs(scaled) : std::abs(scaled - ref) / ref;
      report.max_relative_deviation = std::max(report.max_relative_deviation, dev);
      ++report.evaluations;
    }
  }
  return report;
}

TensorReport check_fundamental_tensor(const FinslerMetric& metric,
                                      std::span<const TangentVector> samples) {
  TensorReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const TangentVector& v : samples) {
    const Mat g = metric.fundamental_tensor(v.base, v.components);
    report.max_asymmetry = std::max(report.max_asymmetry, (g - g.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    report.min_eigenvalue = std::min(report.min_eigenvalue, es.eigenvalues().minCoeff());
  }
  return report;
}

}  // namespace finsler
