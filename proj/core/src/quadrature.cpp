#include "finsler/quadrature.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace finsler {
namespace {

void require_resolution(const std::vector<int>& res, std::size_t n) {
  if (res.size() != n) throw ArgumentError("domain: resolution must have one entry per axis");
  for (int r : res) {
    if (r < 8) throw ArgumentError("domain: resolution must be >= 8 per axis");
  }
}

std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os.precision(12);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace

GaussLegendre gauss_legendre(int m) {
  if (m < 1) throw ArgumentError("gauss_legendre: need at least one node");
  GaussLegendre gl;
  gl.nodes.resize(m);
  gl.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= m; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = m * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[m - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[m - 1 - i] = w;
  }
  return gl;
}

FiberQuadrature FiberQuadrature::make(int n, int nodes) {
  FiberQuadrature q;
  q.dim = n;
  q.resolution = nodes;
  switch (n) {
    case 1:
      q.nodes = {make_vec({1.0}), make_vec({-1.0})};
      q.weights = {1.0, 1.0};
      q.resolution = 2;
      break;
    case 2: {
      if (nodes < 4) throw ArgumentError("fiber quadrature: need at least 4 nodes for n = 2");
      const double w = 2.0 * std::numbers::pi / nodes;
      for (int k = 0; k < nodes; ++k) {
        const double t = w * k;
        q.nodes.push_back(make_vec({std::cos(t), std::sin(t)}));
        q.weights.push_back(w);
      }
      break;
    }
    case 3: {
      if (nodes < 2) throw ArgumentError("fiber quadrature: need at least 2 polar nodes for n = 3");
      const GaussLegendre gl = gauss_legendre(nodes);
      const int naz = 2 * nodes;
      const double waz = 2.0 * std::numbers::pi / naz;
      for (int i = 0; i < nodes; ++i) {
        const double c = gl.nodes[i];
        const double s = std::sqrt(1.0 - c * c);
        for (int k = 0; k < naz; ++k) {
          const double az = waz * k;
          q.nodes.push_back(make_vec({s * std::cos(az), s * std::sin(az), c}));
          q.weights.push_back(gl.weights[i] * waz);
        }
      }
      break;
    }
    default:
      throw UnsupportedError("fiber quadrature: dimension must be 1, 2 or 3");
  }
  return q;
}

double FiberQuadrature::total_weight() const { return pairwise_sum(weights); }

std::string FiberQuadrature::describe() const {
  std::ostringstream os;
  switch (dim) {
    case 1: os << "two-point"; break;
    case 2: os << "periodic-trapezoid(" << nodes.size() << ")"; break;
    default: os << "gauss-legendre-x-trapezoid(" << resolution << "x" << 2 * resolution << ")"; break;
  }
  return os.str();
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Box: return "box";
    case DomainKind::Torus: return "torus";
    case DomainKind::Ball: return "ball";
    case DomainKind::HalfBall: return "half_ball";
  }
  return "unknown";
}

Domain Domain::box(Vec lo, Vec hi, std::vector<int> resolution) {
  const auto n = lo.size();
  if (n < 1 || n > kMaxDim || hi.size() != n) throw ArgumentError("domain: bad dimension");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(lo[k] < hi[k])) throw ArgumentError("domain: need lo < hi on every axis");
  }
  require_resolution(resolution, static_cast<std::size_t>(n));
  Domain d;
  d.kind_ = DomainKind::Box;
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  d.resolution_ = std::move(resolution);
  return d;
}

Domain Domain::box(Vec lo, Vec hi, int resolution) {
  const auto n = static_cast<std::size_t>(lo.size());
  return box(std::move(lo), std::move(hi), std::vector<int>(n, resolution));
}

Domain Domain::torus(Vec periods, int resolution) {
  Domain d = box(Vec::Zero(periods.size()), periods, resolution);
  d.kind_ = DomainKind::Torus;
  return d;
}

Domain Domain::ball(int n, double radius, int resolution) {
  if (!(radius > 0.0)) throw ArgumentError("domain: ball radius must be positive");
  Domain d = box(Vec::Constant(n, -radius), Vec::Constant(n, radius), resolution);
  d.kind_ = DomainKind::Ball;
  d.radius_ = radius;
  return d;
}

Domain Domain::half_ball(int n, double radius, int resolution) {
  Domain d = ball(n, radius, resolution);
  d.kind_ = DomainKind::HalfBall;
  return d;
}

Domain Domain::restricted(Vec lo, Vec hi) const {
  if (lo.size() != lo_.size() || hi.size() != hi_.size()) throw ArgumentError("domain: bad restriction");
  Domain d = *this;
  d.active_ = std::make_pair(std::move(lo), std::move(hi));
  return d;
}

double Domain::spacing(int axis) const { return (hi_[axis] - lo_[axis]) / resolution_[static_cast<std::size_t>(axis)]; }

double Domain::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= spacing(k);
  return v;
}

std::size_t Domain::node_count() const {
  std::size_t c = 1;
  for (int r : resolution_) c *= static_cast<std::size_t>(r);
  return c;
}

std::vector<int> Domain::node_multi_index(std::size_t index) const {
  std::vector<int> m(resolution_.size());
  for (std::size_t k = 0; k < resolution_.size(); ++k) {
    m[k] = static_cast<int>(index % static_cast<std::size_t>(resolution_[k]));
    index /= static_cast<std::size_t>(resolution_[k]);
  }
  return m;
}

std::size_t Domain::flat_index(const std::vector<int>& multi) const {
  std::size_t idx = 0;
  for (int k = dim() - 1; k >= 0; --k) {
    idx = idx * static_cast<std::size_t>(resolution_[static_cast<std::size_t>(k)]) +
          static_cast<std::size_t>(multi[static_cast<std::size_t>(k)]);
  }
  return idx;
}

Vec Domain::node(std::size_t index) const {
  const int n = dim();
  Vec x(n);
  for (int k = 0; k < n; ++k) {
    const auto r = static_cast<std::size_t>(resolution_[static_cast<std::size_t>(k)]);
    const auto i = static_cast<double>(index % r);
    index /= r;
    x[k] = lo_[k] + (i + 0.5) * spacing(k);
  }
  return x;
}

bool Domain::contains(const Vec& x) const {
  for (int k = 0; k < dim(); ++k) {
    if (x[k] < lo_[k] || x[k] > hi_[k]) return false;
  }
  if (kind_ == DomainKind::Ball && x.norm() >= radius_) return false;
  if (kind_ == DomainKind::HalfBall && (x.norm() >= radius_ || x[0] > 0.0)) return false;
  if (active_) {
    for (int k = 0; k < dim(); ++k) {
      if (x[k] < active_->first[k] || x[k] > active_->second[k]) return false;
    }
  }
  return true;
}

double Domain::weight(std::size_t index) const {
  if (kind_ == DomainKind::Box || kind_ == DomainKind::Torus) {
    if (!active_) return cell_volume();
  }
  return contains(node(index)) ? cell_volume() : 0.0;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == DomainKind::Ball || kind_ == DomainKind::HalfBall) {
    os << "(r=" << radius_ << ")";
  } else {
    os << vec_str(lo_) << "x" << vec_str(hi_);
  }
  os << "@";
  for (std::size_t k = 0; k < resolution_.size(); ++k) os << (k ? "x" : "") << resolution_[k];
  if (active_) os << "|active" << vec_str(active_->first) << "x" << vec_str(active_->second);
  return os.str();
}

double base_quadrature_values(const Domain& domain, const std::vector<double>& values) {
  const std::size_t count = domain.node_count();
  if (values.size() != count) throw ArgumentError("base quadrature: value count mismatch");
  std::vector<double> terms(count);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = domain.weight(i);
    if (w == 0.0) {
      terms[i] = 0.0;
      continue;
    }
    if (!std::isfinite(values[i])) {
      bad.push_back(i);
      terms[i] = 0.0;
      continue;
    }
    terms[i] = w * values[i];
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "integration: " << bad.size() << " non-finite sample(s) at nodes";
    for (std::size_t k = 0; k < bad.size() && k < 5; ++k) os << ' ' << vec_str(domain.node(bad[k]));
    throw NumericalError(os.str());
  }
  return pairwise_sum(terms);
}

double base_quadrature(const Domain& domain, const std::function<double(const Vec&)>& f) {
  const std::size_t count = domain.node_count();
  std::vector<double> values(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) != 0.0) values[i] = f(domain.node(i));
  });
  return base_quadrature_values(domain, values);
}

}  // namespace finsler
