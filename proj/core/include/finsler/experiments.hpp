#pragma once

#include "finsler/approximation.hpp"
#include "finsler/field.hpp"
#include "finsler/metric.hpp"
#include "finsler/quadrature.hpp"

#include <cstdint>
#include <vector>

namespace finsler {

/// Strip R x (0, 1) whose fibers are circles of radius r(x^1) = e^{-(x^1)^2}; the SM
/// measure is (fiber arc length) dx dy. Defined at the measure level, with no Finsler
/// structure behind it.
struct ShrinkingFiberModel {
  /// Base cells per unit length along x^1 and along x^2 (powers of two keep the base
  /// measure exact in binary).
  int cells_per_unit_x = 64;
  int cells_y = 8;

  [[nodiscard]] double fiber_radius(double x1) const { return std::exp(-x1 * x1); }
  [[nodiscard]] double fiber_length(double x1) const;
  /// Base strip [-L, L] x [0, 1] on the model grid.
  [[nodiscard]] Domain strip(double L) const;
  /// c_1 * inf over samples of the fiber density r(x^1), samples spanning [-L, L] with
  /// the endpoints included.
  [[nodiscard]] double stry_constant(double L, int sample_count = 1000) const;
};

struct FiberDecayResult {
  double L = 0.0;
  double sm_integral = 0.0;
  double m_integral = 0.0;
};

/// int_0^1 int_{-L}^{L} 2 pi e^{-x^2} dx dy and int 1 dx dy by base quadrature.
FiberDecayResult fiber_decay_example(double L, const ShrinkingFiberModel& model = {});

/// 1 / (2 + 2^{1/p'}), 1/p + 1/p' = 1.
double sharpness_bound(double p);

/// Rows (w, ||u - phi_w||_{H_1^p(W)}, lp, grad_lp) on W = [-1, 1] x [0, 1] for the step u
/// and C^1 ramps phi_w, with classical (dx) norms; metadata carries the bound.
ConvergenceTable sharpness_experiment(double p, const std::vector<double>& widths,
                                      int resolution = 400);

/// Spectral solution of Delta u = f on the flat torus [0, 2 pi)^n, Delta = div grad.
struct DirichletSolution {
  Domain domain;
  ScalarField u;              ///< grid field with spectral gradients
  std::vector<double> f;      ///< f at the nodes
  double residual = 0.0;      ///< max |Delta u - f| on the grid
  double mean_f = 0.0;
};

/// Refuses f whose grid mean exceeds 1e-10 in magnitude (HypothesisError). N must be a
/// power of two >= 16.
DirichletSolution dirichlet_solve_torus(const ScalarField& f, int N, int n = 2);

/// max over test fields v of |int grad u . grad v + int f v| / (||grad u|| ||grad v|| + ||f|| ||v||),
/// with v random trigonometric fields drawn from a fixed seed.
double dirichlet_weak_form_defect(const DirichletSolution& sol, int test_fields = 20,
                                  std::uint64_t seed = 20240607);

/// mollification_convergence of the solution on its torus with p = 2.
ConvergenceTable dirichlet_approximation(const DirichletSolution& sol,
                                         const std::vector<double>& eps_list);

struct GsComparison {
  double ours = 0.0;
  double gs = 0.0;
  double ratio = 0.0;
};

/// sobolev_norm with (k, p) = (1, 2) against gs_norm.
GsComparison compare_gs(const FinslerMetric& metric, const ScalarField& u, const Domain& domain,
                        const FiberQuadrature& rule);

}  // namespace finsler
