#pragma once

#include "finsler/field.hpp"
#include "finsler/metric.hpp"
#include "finsler/quadrature.hpp"

#include <string>

namespace finsler {

/// Order k and exponent p of the norm; k in {0, 1}, p >= 1.
struct SobolevSpec {
  int k = 1;
  double p = 2.0;

  void validate() const;
  [[nodiscard]] std::string describe() const;
};

/// |grad u|(x, y) = sqrt(g^{ij}(x, y) d_i u d_j u).
double horizontal_gradient_norm(const FinslerMetric& metric, const ScalarField& u,
                                const TangentVector& v);

/// (int_SM |u|^p dV_SM)^{1/p}
double lp_norm_SM(const FinslerMetric& metric, const ScalarField& u, double p,
                  const Domain& domain, const FiberQuadrature& rule);

/// (int_M |u|^p dV_F)^{1/p}
double lp_norm_M(const FinslerMetric& metric, const ScalarField& u, double p,
                 const Domain& domain, const FiberQuadrature& rule);

/// The individual terms of the H_k^p norm.
struct SobolevTerms {
  double lp = 0.0;       ///< (int_SM |u|^p)^{1/p}
  double grad_lp = 0.0;  ///< (int_SM |grad u|^p)^{1/p}; 0 when k = 0
  double total = 0.0;    ///< lp + grad_lp
};

SobolevTerms sobolev_terms(const FinslerMetric& metric, const ScalarField& u,
                           const SobolevSpec& spec, const Domain& domain,
                           const FiberQuadrature& rule);

/// sum_{j <= k} (int_SM |grad^j u|^p dV_SM)^{1/p}. k >= 2 raises UnsupportedError.
double sobolev_norm(const FinslerMetric& metric, const ScalarField& u, const SobolevSpec& spec,
                    const Domain& domain, const FiberQuadrature& rule);

/// ||u||_{L^p(dx)} + ||grad u||_{L^p(dx)} on the chart, without fiber factors.
SobolevTerms classical_sobolev_terms(const ScalarField& u, const SobolevSpec& spec,
                                     const Domain& domain);

/// F*(x, xi) = max { xi(y) : F(x, y) = 1 }. n = 2: coarse angular scan refined by
/// golden-section search; n = 3: scan over a polar grid then local pattern refinement.
double dual_norm(const FinslerMetric& metric, const Point& x, const Vec& xi);

/// Same maximum by a plain scan over `samples` fiber directions.
double dual_norm_brute_force(const FinslerMetric& metric, const Point& x, const Vec& xi,
                             int samples);

/// (int_M u^2 dV_F)^{1/2} + (int_M F*(du)^2 dV_F)^{1/2}. Irreversible metrics are
/// refused with ReversibilityError.
double gs_norm(const FinslerMetric& metric, const ScalarField& u, const Domain& domain,
               const FiberQuadrature& rule);

}  // namespace finsler
