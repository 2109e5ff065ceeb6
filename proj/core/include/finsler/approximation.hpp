#pragma once

#include "finsler/distance.hpp"
#include "finsler/field.hpp"
#include "finsler/metric.hpp"
#include "finsler/mollifier.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/sobolev.hpp"

#include <string>
#include <utility>
#include <vector>

namespace finsler {

/// Rows of (parameter, values...) with run metadata. The first column is the parameter
/// and must be strictly monotone.
struct ConvergenceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<double> row);
  void set_meta(const std::string& key, const std::string& value);
  [[nodiscard]] std::vector<double> column(const std::string& name) const;
  [[nodiscard]] std::string meta(const std::string& key) const;
};

/// f(t) = 1 for t <= 0, 1 - t on (0, 1), 0 for t >= 1.
double truncation_profile(double t);
/// f'(t): -1 on (0, 1), 0 elsewhere (the kinks are taken as 0).
double truncation_profile_derivative(double t);

/// phi_j(x) = phi(x) f(d(x0, x) - j). The box [lo, hi] bounds the grid used by the
/// numeric distance tiers. Tagged piecewise.
ScalarField truncate(const ScalarField& phi, const FinslerMetric& metric, const Point& x0, int j,
                     const DistanceProvider& provider, const Vec& lo, const Vec& hi);

/// Columns j, lp_sm, grad_lp_sm, h1p: the terms of ||phi_j - phi||_{H_1^p} for
/// j = 1..j_max on the domain.
ConvergenceTable density_experiment(const FinslerMetric& metric, const ScalarField& phi, double p,
                                    int j_max, const DistanceProvider& provider,
                                    const FiberQuadrature& rule, const Domain& domain,
                                    const Point& x0);

/// Columns eps, lp_err, h1p_err, young_ratio. Errors are measured on the interior
/// subdomain shrunk by `margin` on every side (no shrink on a torus); negative margin
/// selects the largest eps. young_ratio = ||J_eps * u||_p / ||u||_p over the whole grid
/// with respect to dx.
ConvergenceTable mollification_convergence(const FinslerMetric& metric, const ScalarField& u,
                                           double p, const std::vector<double>& eps_list,
                                           const Domain& domain, const FiberQuadrature& rule,
                                           double margin = -1.0);

/// h_m(x) = u(x^1 - 1/m, x^2, ...).
ScalarField boundary_translate(const ScalarField& u, int m);

struct Box {
  Vec lo;
  Vec hi;
};

/// alpha_i = beta_i / sum_j beta_j with beta_i the tensor-product bump of box i. Every
/// point of the region (checked on a grid of `check_per_axis` points per axis, ends
/// included) must lie inside some open box; otherwise ArgumentError names the point.
std::vector<ScalarField> partition_of_unity(const std::vector<Box>& cover, const Box& region,
                                            int check_per_axis = 101);

}  // namespace finsler
