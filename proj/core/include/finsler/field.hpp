#pragma once

#include "finsler/linalg.hpp"
#include "finsler/quadrature.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace finsler {

enum class Smoothness { Smooth, Piecewise, DiscreteGrid };

std::string to_string(Smoothness s);

/// Node values (and gradients) of a field on the grid of a Domain.
struct GridData {
  Domain domain;
  std::vector<double> values;
  /// Row-major, dim entries per node; empty when the field carries no grid gradient.
  std::vector<double> gradients;

  [[nodiscard]] bool matches(const Domain& other) const;
  [[nodiscard]] Vec gradient_at(std::size_t node) const;
};

/// A function on the base manifold; u and u o pi are not distinguished.
///
/// Without an analytic gradient the field is differentiated by central differences
/// with step fd_step * (1 + |x|).
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  Smoothness smoothness = Smoothness::Smooth;
  double fd_step = 1e-6;
  std::string name;
  /// Present when the field is defined by node values; sampling on a matching domain
  /// then reads the nodes directly.
  std::shared_ptr<const GridData> grid;

  double operator()(const Vec& x) const { return value(x); }
  [[nodiscard]] Vec grad(const Vec& x) const;
  [[nodiscard]] bool has_analytic_gradient() const { return static_cast<bool>(gradient); }
};

/// Values and gradients of a field at every node of a domain (zero at inactive nodes).
struct NodeSamples {
  std::vector<double> values;
  std::vector<Vec> gradients;
};

NodeSamples sample(const ScalarField& u, const Domain& domain, bool with_gradient = true);

ScalarField operator+(const ScalarField& u, const ScalarField& v);
ScalarField operator-(const ScalarField& u, const ScalarField& v);
ScalarField operator*(double c, const ScalarField& u);

namespace fields {

ScalarField zero(int n);
ScalarField constant(int n, double c);
/// e^{-|x - c|^2}
ScalarField gaussian(int n, const Vec& center);
ScalarField gaussian(int n);
/// x^axis
ScalarField coordinate(int n, int axis = 0);
/// 1 for x^1 > 0, else 0; gradient 0 off the jump.
ScalarField step(int n);
/// smoothstep((x^1 + w/2) / w) clamped to [0, 1]: C^1 cubic ramp of width w.
ScalarField ramp(int n, double w);
/// exp(1 - 1/(1 - |x - c|^2/r^2)) inside |x - c| < r, else 0. Peak value 1.
ScalarField bump(int n, const Vec& center, double radius);
/// sin(pi x^1)
ScalarField sine(int n);
/// amplitude * cos(k . x + phase)
ScalarField trig(const Vec& k, double phase, double amplitude = 1.0);
/// Field by catalog name: gaussian, coordinate, step, ramp(w), bump, sine, zero, one,
/// cos1 (cos x^1), cos12 (cos x^1 cos x^2).
ScalarField by_name(const std::string& name, int n);

}  // namespace fields

/// A field defined by node values, evaluated off-node by multilinear interpolation
/// (periodic on tori, clamped otherwise). Gradients are interpolated the same way when
/// supplied, else taken from the interpolant by central differences.
ScalarField grid_field(Domain domain, std::vector<double> values,
                       std::vector<double> gradients = {}, std::string name = "grid");

}  // namespace finsler
