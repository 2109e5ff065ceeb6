#pragma once

#include "finsler/field.hpp"
#include "finsler/linalg.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

/// J(x) = C_n exp(1/(|x|^2 - 1)) on |x| < 1, scaled to J_eps(x) = eps^{-n} J(x / eps).
struct MollifierSpec {
  double eps = 0.5;
  int dim = 2;
  /// 1 / int_{|x|<1} exp(1/(|x|^2 - 1)) dx, by tanh-sinh quadrature of the radial profile.
  double C = 0.0;

  static MollifierSpec make(int n, double eps);
};

/// Normalizing constant C_n of the standard bump.
double bump_normalization(int n);

double mollifier_kernel(const MollifierSpec& spec, const Vec& x);
Vec mollifier_kernel_gradient(const MollifierSpec& spec, const Vec& x);

/// Discrete convolution J_eps * u on the domain grid.
///
/// u is sampled at the nodes (zero at inactive nodes, and outside a box). Kernel
/// weights J_eps(x - z) h^n are normalized by their sum over the full lattice, so the
/// discrete kernel has unit mass and a constant field is reproduced away from the
/// boundary. Boxes use direct summation over the kernel stencil; tori use the same
/// weights through an FFT circular convolution. Node gradients are J_eps * grad u for
/// fields that are not piecewise (on boxes only where the stencil stays inside the
/// grid) and grad J_eps * u otherwise. The returned field carries node values and
/// gradients; off-node queries are summed directly from the kernel.
///
/// Refused (ArgumentError) when some grid spacing is >= eps / 4.
ScalarField mollify(const ScalarField& u, const MollifierSpec& spec, const Domain& domain);

/// Sum of the discrete kernel weights before normalization (close to 1).
double discrete_kernel_mass(const MollifierSpec& spec, const Domain& domain);

}  // namespace finsler
