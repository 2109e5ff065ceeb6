#include "finsler/field.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

namespace finsler {
namespace {

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}

double smoothstep_d(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 6.0 * s * (1.0 - s);
}

Vec unit_axis(int n, int axis) {
  Vec e = Vec::Zero(n);
  e[axis] = 1.0;
  return e;
}

// Multilinear interpolation of node data at x; `stride` values per node, component c.
double interpolate(const GridData& g, const Vec& x, int stride, int c, const std::vector<double>& data) {
  const Domain& d = g.domain;
  const int n = d.dim();
  const bool periodic = d.kind() == DomainKind::Torus;
  int base[kMaxDim];
  double frac[kMaxDim];
  for (int k = 0; k < n; ++k) {
    const int r = d.resolution()[static_cast<std::size_t>(k)];
    double t = (x[k] - d.lo()[k]) / d.spacing(k) - 0.5;
    if (periodic) {
      t = std::fmod(t, static_cast<double>(r));
      if (t < 0.0) t += r;
      base[k] = static_cast<int>(std::floor(t));
      frac[k] = t - base[k];
    } else {
      t = std::clamp(t, 0.0, static_cast<double>(r - 1));
      base[k] = std::min(static_cast<int>(std::floor(t)), r - 2);
      frac[k] = t - base[k];
    }
  }
  double acc = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      const int bit = (corner >> k) & 1;
      const int r = d.resolution()[static_cast<std::size_t>(k)];
      int i = base[k] + bit;
      if (periodic) i %= r;
      idx[static_cast<std::size_t>(k)] = i;
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    if (w == 0.0) continue;
    acc += w * data[d.flat_index(idx) * static_cast<std::size_t>(stride) + static_cast<std::size_t>(c)];
  }
  return acc;
}

}  // namespace

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::Smooth: return "smooth";
    case Smoothness::Piecewise: return "piecewise";
    case Smoothness::DiscreteGrid: return "discrete-grid";
  }
  return "unknown";
}

bool GridData::matches(const Domain& other) const {
  return domain.kind() == other.kind() && domain.resolution() == other.resolution() &&
         domain.lo() == other.lo() && domain.hi() == other.hi();
}

Vec GridData::gradient_at(std::size_t node) const {
  const int n = domain.dim();
  Vec g(n);
  for (int k = 0; k < n; ++k) g[k] = gradients[node * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
  return g;
}

Vec ScalarField::grad(const Vec& x) const {
  if (gradient) return gradient(x);
  const int n = static_cast<int>(x.size());
  const double h = fd_step * (1.0 + x.norm());
  Vec g(n);
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (value(xp) - value(xm)) / (2.0 * h);
  }
  return g;
}

NodeSamples sample(const ScalarField& u, const Domain& domain, bool with_gradient) {
  const std::size_t count = domain.node_count();
  NodeSamples s;
  s.values.assign(count, 0.0);
  if (with_gradient) s.gradients.assign(count, Vec::Zero(domain.dim()));
  const bool direct = u.grid && u.grid->matches(domain);
  parallel_for(count, [&](std::size_t i) {
    if (domain.weight(i) == 0.0) return;
    if (direct) {
      s.values[i] = u.grid->values[i];
      if (with_gradient) {
        s.gradients[i] = u.grid->gradients.empty() ? u.grad(domain.node(i)) : u.grid->gradient_at(i);
      }
      return;
    }
    const Vec x = domain.node(i);
    s.values[i] = u.value(x);
    if (with_gradient) s.gradients[i] = u.grad(x);
  });
  return s;
}

namespace {

Smoothness combine(Smoothness a, Smoothness b) { return std::max(a, b); }

ScalarField combine_fields(const ScalarField& u, const ScalarField& v, double cu, double cv,
                           const std::string& name) {
  ScalarField w;
  w.value = [u, v, cu, cv](const Vec& x) { return cu * u.value(x) + cv * v.value(x); };
  w.gradient = [u, v, cu, cv](const Vec& x) { return Vec(cu * u.grad(x) + cv * v.grad(x)); };
  w.smoothness = combine(u.smoothness, v.smoothness);
  w.fd_step = std::min(u.fd_step, v.fd_step);
  w.name = name;
  return w;
}

}  // namespace

ScalarField operator+(const ScalarField& u, const ScalarField& v) {
  return combine_fields(u, v, 1.0, 1.0, u.name + "+" + v.name);
}

ScalarField operator-(const ScalarField& u, const ScalarField& v) {
  return combine_fields(u, v, 1.0, -1.0, u.name + "-" + v.name);
}

ScalarField operator*(double c, const ScalarField& u) {
  ScalarField w;
  w.value = [u, c](const Vec& x) { return c * u.value(x); };
  w.gradient = [u, c](const Vec& x) { return Vec(c * u.grad(x)); };
  w.smoothness = u.smoothness;
  w.fd_step = u.fd_step;
  std::ostringstream os;
  os << c << "*" << u.name;
  w.name = os.str();
  return w;
}

namespace fields {

ScalarField zero(int n) { return constant(n, 0.0); }

ScalarField constant(int n, double c) {
  ScalarField u;
  u.value = [c](const Vec&) { return c; };
  u.gradient = [n](const Vec&) { return Vec(Vec::Zero(n)); };
  std::ostringstream os;
  os << "constant(" << c << ")";
  u.name = c == 0.0 ? "zero" : os.str();
  return u;
}

ScalarField gaussian(int n, const Vec& center) {
  if (center.size() != n) throw ArgumentError("gaussian: center dimension mismatch");
  ScalarField u;
  u.value = [center](const Vec& x) { return std::exp(-(x - center).squaredNorm()); };
  u.gradient = [center](const Vec& x) {
    return Vec(-2.0 * (x - center) * std::exp(-(x - center).squaredNorm()));
  };
  u.name = center.isZero(0.0) ? "gaussian" : "gaussian(shifted)";
  return u;
}

ScalarField gaussian(int n) { return gaussian(n, Vec::Zero(n)); }

ScalarField coordinate(int n, int axis) {
  if (axis < 0 || axis >= n) throw ArgumentError("coordinate: axis out of range");
  ScalarField u;
  u.value = [axis](const Vec& x) { return x[axis]; };
  u.gradient = [n, axis](const Vec&) { return unit_axis(n, axis); };
  u.name = "coordinate";
  return u;
}

ScalarField step(int n) {
  ScalarField u;
  u.value = [](const Vec& x) { return x[0] > 0.0 ? 1.0 : 0.0; };
  u.gradient = [n](const Vec&) { return Vec(Vec::Zero(n)); };
  u.smoothness = Smoothness::Piecewise;
  u.name = "step";
  return u;
}

ScalarField ramp(int n, double w) {
  if (!(w > 0.0 && w <= 1.0)) throw ArgumentError("ramp: width must lie in (0, 1]");
  ScalarField u;
  u.value = [w](const Vec& x) { return smoothstep((x[0] + 0.5 * w) / w); };
  u.gradient = [n, w](const Vec& x) {
    return Vec(unit_axis(n, 0) * smoothstep_d((x[0] + 0.5 * w) / w) / w);
  };
  std::ostringstream os;
  os << "ramp(" << w << ")";
  u.name = os.str();
  return u;
}

ScalarField bump(int n, const Vec& center, double radius) {
  if (center.size() != n || !(radius > 0.0)) throw ArgumentError("bump: bad center or radius");
  ScalarField u;
  u.value = [center, radius](const Vec& x) {
    const double s = (x - center).squaredNorm() / (radius * radius);
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  };
  u.gradient = [n, center, radius](const Vec& x) {
    const double s = (x - center).squaredNorm() / (radius * radius);
    if (s >= 1.0) return Vec(Vec::Zero(n));
    const double q = 1.0 - s;
    const double e = std::exp(1.0 - 1.0 / q);
    return Vec(-e / (q * q) * 2.0 * (x - center) / (radius * radius));
  };
  std::ostringstream os;
  os << "bump(r=" << radius << ")";
  u.name = os.str();
  return u;
}

ScalarField sine(int n) {
  ScalarField u;
  u.value = [](const Vec& x) { return std::sin(std::numbers::pi * x[0]); };
  u.gradient = [n](const Vec& x) {
    return Vec(unit_axis(n, 0) * std::numbers::pi * std::cos(std::numbers::pi * x[0]));
  };
  u.name = "sine";
  return u;
}

ScalarField trig(const Vec& k, double phase, double amplitude) {
  ScalarField u;
  u.value = [k, phase, amplitude](const Vec& x) { return amplitude * std::cos(k.dot(x) + phase); };
  u.gradient = [k, phase, amplitude](const Vec& x) {
    return Vec(-amplitude * std::sin(k.dot(x) + phase) * k);
  };
  u.name = "trig";
  return u;
}

ScalarField by_name(const std::string& name, int n) {
  static const std::regex ramp_re(R"(ramp\(\s*([0-9.eE+-]+)\s*\))");
  std::smatch m;
  if (name == "gaussian") return gaussian(n);
  if (name == "coordinate") return coordinate(n, 0);
  if (name == "step") return step(n);
  if (name == "sine") return sine(n);
  if (name == "zero") return zero(n);
  if (name == "one") return constant(n, 1.0);
  if (name == "bump") return bump(n, Vec::Zero(n), 0.6);
  if (name == "cos1") {
    ScalarField u = trig(unit_axis(n, 0), 0.0);
    u.name = "cos1";
    return u;
  }
  if (name == "cos12") {
    if (n < 2) throw ArgumentError("field cos12 needs n >= 2");
    ScalarField u;
    u.value = [](const Vec& x) { return std::cos(x[0]) * std::cos(x[1]); };
    u.gradient = [n](const Vec& x) {
      Vec g = Vec::Zero(n);
      g[0] = -std::sin(x[0]) * std::cos(x[1]);
      g[1] = -std::cos(x[0]) * std::sin(x[1]);
      return g;
    };
    u.name = "cos12";
    return u;
  }
  if (std::regex_match(name, m, ramp_re)) return ramp(n, std::stod(m[1].str()));
  throw ArgumentError("unknown field '" + name + "'");
}

}  // namespace fields

ScalarField grid_field(Domain domain, std::vector<double> values, std::vector<double> gradients,
                       std::string name) {
  const std::size_t count = domain.node_count();
  const auto n = static_cast<std::size_t>(domain.dim());
  if (values.size() != count) throw ArgumentError("grid_field: value count mismatch");
  if (!gradients.empty() && gradients.size() != count * n) {
    throw ArgumentError("grid_field: gradient count mismatch");
  }
  auto data = std::make_shared<GridData>(GridData{std::move(domain), std::move(values), std::move(gradients)});
  ScalarField u;
  u.value = [data](const Vec& x) { return interpolate(*data, x, 1, 0, data->values); };
  if (!data->gradients.empty()) {
    u.gradient = [data](const Vec& x) {
      const int dim = data->domain.dim();
      Vec g(dim);
      for (int k = 0; k < dim; ++k) g[k] = interpolate(*data, x, dim, k, data->gradients);
      return g;
    };
  }
  u.smoothness = Smoothness::DiscreteGrid;
  u.fd_step = 0.25 * data->domain.spacing(0);
  u.name = std::move(name);
  u.grid = data;
  return u;
}

}  // namespace finsler
