#include "finsler/error.hpp"
#include "finsler/experiments.hpp"
#include "finsler/field.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace finsler;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("fiber decay examples") {
  const auto r50 = fiber_decay_example(50.0);
  CHECK(r50.m_integral == doctest::Approx(100.0).epsilon(1e-12));
  const auto r1 = fiber_decay_example(1.0);
  const auto r5 = fiber_decay_example(5.0);
  CHECK(r1.sm_integral < r5.sm_integral);
  CHECK(r5.sm_integral < 2.0 * std::pow(kPi, 1.5));
  CHECK(r5.sm_integral == doctest::Approx(2.0 * std::pow(kPi, 1.5)).epsilon(1e-6));
  CHECK(r1.m_integral == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(fiber_decay_example(0.5), ArgumentError);
}

TEST_CASE("shrinking-fiber Stry constant decays like e^{-L^2}") {
  const ShrinkingFiberModel model;
  for (double L : {1.0, 2.0, 3.0}) {
    CAPTURE(L);
    const double expected = 2.0 * kPi * std::exp(-L * L);
    const double got = model.stry_constant(L);
    CHECK(got <= 2.0 * expected);
    CHECK(got >= 0.5 * expected);
  }
  CHECK(model.stry_constant(2.0) < model.stry_constant(1.0));
  CHECK_THROWS_AS((void)model.stry_constant(1.0, 50), ArgumentError);
}

TEST_CASE("sharpness bound values") {
  CHECK(sharpness_bound(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(sharpness_bound(2.0) == doctest::Approx(1.0 / (2.0 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(sharpness_bound(4.0) == doctest::Approx(1.0 / (2.0 + std::pow(2.0, 0.75))).epsilon(1e-15));
  CHECK_THROWS_AS(sharpness_bound(0.5), ArgumentError);
}

TEST_CASE("sharpness experiment stays above the bound") {
  for (double p : {1.0, 2.0, 4.0}) {
    CAPTURE(p);
    const auto t = sharpness_experiment(p, {0.1, 0.5, 1.0}, 200);
    CHECK(t.columns == std::vector<std::string>{"w", "h1p", "lp", "grad_lp"});
    CHECK(t.rows.size() == 3);
    const double bound = sharpness_bound(p);
    for (double h : t.column("h1p")) CHECK(h >= bound);
    CHECK_FALSE(t.meta("bound").empty());
  }
  CHECK_THROWS_AS(sharpness_experiment(2.0, {}, 200), ArgumentError);
  CHECK_THROWS_AS(sharpness_experiment(2.0, {0.5}, 15), ArgumentError);
}

TEST_CASE("Dirichlet problem on the torus") {
  SUBCASE("cos1") {
    const auto f = fields::by_name("cos1", 2);
    const auto sol = dirichlet_solve_torus(f, 64);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.domain.node_count(); ++i) {
      const Vec x = sol.domain.node(i);
      err = std::max(err, std::abs(sol.u(x) + std::cos(x[0])));
    }
    CHECK(err < 1e-12);
    CHECK(sol.residual < 1e-10);
    CHECK(std::abs(sol.mean_f) < 1e-12);
  }
  SUBCASE("cos12") {
    const auto f = fields::by_name("cos12", 2);
    const auto sol = dirichlet_solve_torus(f, 64);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.domain.node_count(); ++i) {
      const Vec x = sol.domain.node(i);
      err = std::max(err, std::abs(sol.u(x) + 0.5 * f(x)));
    }
    CHECK(err < 1e-12);
    CHECK(dirichlet_weak_form_defect(sol, 10, 7) < 1e-10);
  }
  SUBCASE("zero") {
    const auto sol = dirichlet_solve_torus(fields::zero(2), 128);
    for (std::size_t i = 0; i < sol.domain.node_count(); ++i) CHECK(sol.u(sol.domain.node(i)) == 0.0);
    const auto t = dirichlet_approximation(sol, {0.5, 0.25});
    for (const auto& row : t.rows) {
      for (std::size_t k = 1; k < 3; ++k) CHECK(row[k] == 0.0);
    }
  }
  CHECK_THROWS_AS(dirichlet_solve_torus(fields::zero(2), 48), ArgumentError);
  CHECK_THROWS_AS(dirichlet_solve_torus(fields::zero(2), 8), ArgumentError);
  CHECK_THROWS_AS(dirichlet_solve_torus(fields::constant(2, 1.0), 32), HypothesisError);
}

TEST_CASE("Ge-Shen comparison") {
  const auto rule = FiberQuadrature::make(2, 64);
  const auto box = Domain::box(make_vec({-6, -6}), make_vec({6, 6}), 96);
  const auto e = compare_gs(FinslerMetric::euclidean(2), fields::gaussian(2), box, rule);
  CHECK(e.ratio == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-10));

  const auto unit = Domain::box(make_vec({-0.5, -0.5}), make_vec({0.5, 0.5}), 32);
  const auto conf = FinslerMetric::conformal(2, ConformalFactor::linear(make_vec({0.3, 0.0})));
  const auto c = compare_gs(conf, fields::coordinate(2, 0), unit, rule);
  CHECK(c.ratio == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-8));

  const auto q = FinslerMetric::quartic(2, 0.1);
  const auto coarse = compare_gs(q, fields::gaussian(2), Domain::box(make_vec({-4, -4}), make_vec({4, 4}), 48), rule);
  const auto fine = compare_gs(q, fields::gaussian(2), Domain::box(make_vec({-4, -4}), make_vec({4, 4}), 96), rule);
  CHECK(coarse.ratio > 1.0);
  CHECK(coarse.ratio < 10.0);
  CHECK(std::abs(fine.ratio - coarse.ratio) < 1e-3 * fine.ratio);

  CHECK_THROWS_AS(compare_gs(FinslerMetric::randers(make_vec({0.5, 0.0})), fields::gaussian(2), unit, rule),
                  ReversibilityError);
}
