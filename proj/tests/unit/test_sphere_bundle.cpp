#include "finsler/error.hpp"
#include "finsler/parallel.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/sphere_bundle.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace finsler;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("fiber rule weights sum to c_{n-1}") {
  CHECK(FiberQuadrature::make(1, 2).total_weight() == 2.0);
  CHECK(std::abs(FiberQuadrature::make(2, 64).total_weight() - 2.0 * kPi) < 1e-14);
  CHECK(std::abs(FiberQuadrature::make(3, 12).total_weight() - 4.0 * kPi) < 1e-12);
  for (double w : FiberQuadrature::make(3, 12).weights) CHECK(w > 0.0);
  for (const Vec& v : FiberQuadrature::make(3, 12).nodes) CHECK(std::abs(v.norm() - 1.0) < 1e-15);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto gl = gauss_legendre(6);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 10);
  CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("domain grids") {
  const auto box = Domain::box(make_vec({0, 0}), make_vec({1, 2}), 8);
  CHECK(box.node_count() == 64);
  CHECK(box.cell_volume() == doctest::Approx(0.125 * 0.25));
  CHECK((box.node(0) - make_vec({1.0 / 16, 2.0 / 16})).norm() < 1e-15);
  CHECK(box.flat_index(box.node_multi_index(37)) == 37);
  // staircase boundary: O(h) area error
  const auto ball = Domain::ball(2, 1.0, 64);
  CHECK(base_quadrature(ball, [](const Vec&) { return 1.0; }) == doctest::Approx(kPi).epsilon(1e-2));
  const auto fine = Domain::ball(2, 1.0, 256);
  CHECK(std::abs(base_quadrature(fine, [](const Vec&) { return 1.0; }) - kPi) < 1e-3);
  const auto half = Domain::half_ball(2, 1.0, 64);
  CHECK(base_quadrature(half, [](const Vec&) { return 1.0; }) == doctest::Approx(kPi / 2).epsilon(1e-2));
  CHECK_THROWS_AS(Domain::box(make_vec({0, 0}), make_vec({1, 1}), 4), ArgumentError);
  CHECK_THROWS_AS(Domain::box(make_vec({1, 0}), make_vec({0, 1}), 8), ArgumentError);
}

TEST_CASE("non-finite samples are reported") {
  const auto box = Domain::box(make_vec({-1, -1}), make_vec({1, 1}), 8);
  CHECK_THROWS_AS(base_quadrature(box, [](const Vec& x) { return x[0] > 0.5 ? NAN : 1.0; }), NumericalError);
}

TEST_CASE("pairwise reduction is independent of thread count") {
  const auto box = Domain::box(make_vec({-3, -3}), make_vec({3, 3}), 97);
  auto f = [](const Vec& x) { return std::sin(3.0 * x[0]) * std::exp(-x.squaredNorm()) + 1e-3 * x[1]; };
  set_thread_count(1);
  const double one = base_quadrature(box, f);
  set_thread_count(7);
  const double seven = base_quadrature(box, f);
  set_thread_count(1);
  CHECK(one == seven);
}

TEST_CASE("indicatrix points") {
  const Vec th = make_vec({0.6, 0.8});
  const auto e = FinslerMetric::euclidean(2);
  CHECK((indicatrix_point(e, Point{0.0, 0.0}, th).components - th).norm() < 1e-15);
  const auto r = FinslerMetric::randers(make_vec({0.5, 0.0}));
  const auto y = indicatrix_point(r, Point{0.0, 0.0}, make_vec({1, 0}));
  CHECK((y.components - make_vec({2.0 / 3.0, 0})).norm() < 1e-15);
  const auto f = FinslerMetric::funk(2);
  CHECK((indicatrix_point(f, Point{0.0, 0.0}, th).components - th).norm() < 1e-15);
  gen::Rng rng(301);
  for (const auto& [name, m] : gen::zoo(2)) {
    for (int i = 0; i < 20; ++i) {
      const Point x(rng.point_for(m));
      CHECK(std::abs(m.F(x, indicatrix_point(m, x, rng.unit(2)).components) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("fiber quadrature examples") {
  const auto rule = FiberQuadrature::make(2, 64);
  const auto e = FinslerMetric::euclidean(2);
  const Point o{0.0, 0.0};
  CHECK(fiber_quadrature(e, o, [](const Vec&, const Vec&) { return 1.0; }, rule) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(fiber_quadrature(e, o, [](const Vec&, const Vec& t) { return t[0] * t[0]; }, rule) ==
        doctest::Approx(kPi).epsilon(1e-14));
  const auto r = FinslerMetric::randers(make_vec({0.5, 0.0}));
  CHECK(fiber_quadrature(r, o, [](const Vec&, const Vec&) { return 1.0; }, rule) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-13));
}

TEST_CASE("fiber node doubling changes smooth results by at most 1e-10") {
  gen::Rng rng(302);
  for (const auto& [name, m] : gen::zoo(2)) {
    CAPTURE(name);
    const Point x(rng.point_for(m, 1.0));
    auto h = [](const Vec&, const Vec& t) { return std::exp(t[0]) * (1.0 + t[1] * t[1]); };
    const double a = fiber_quadrature(m, x, h, FiberQuadrature::make(2, 64));
    const double b = fiber_quadrature(m, x, h, FiberQuadrature::make(2, 128));
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
  }
}

TEST_CASE("volume density") {
  const auto rule = FiberQuadrature::make(2, 64);
  CHECK(volume_density(FinslerMetric::euclidean(2), Point{1.0, 1.0}, rule) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(volume_density(FinslerMetric::randers(make_vec({0.5, 0.0})), Point{0.0, 0.0}, rule) ==
        doctest::Approx(1.0).epsilon(1e-13));
  const auto c = FinslerMetric::conformal(2, ConformalFactor::linear(make_vec({0.4, -0.3}), 0.2));
  gen::Rng rng(303);
  for (int i = 0; i < 20; ++i) {
    const Vec x = rng.vec(2, -2, 2);
    const double lam = 0.2 + 0.4 * x[0] - 0.3 * x[1];
    CHECK(volume_density(c, Point(x), rule) == doctest::Approx(std::exp(2.0 * lam)).epsilon(1e-12));
    // sqrt(det g) for the Riemannian case
    const double sq = std::sqrt(c.fundamental_tensor(Point(x), make_vec({1, 0})).determinant());
    CHECK(std::abs(volume_density(c, Point(x), rule) - sq) <= 1e-8 * sq);
  }
  const auto rule3 = FiberQuadrature::make(3, 16);
  const auto c3 = FinslerMetric::conformal(3, ConformalFactor::linear(make_vec({0.4, 0.0, 0.1})));
  CHECK(volume_density(c3, Point{0.5, 0.0, 1.0}, rule3) == doctest::Approx(std::exp(3.0 * 0.3)).epsilon(1e-12));
}

TEST_CASE("integrate_M and integrate_SM examples") {
  const auto rule = FiberQuadrature::make(2, 64);
  const auto e = FinslerMetric::euclidean(2);
  const auto big = Domain::box(make_vec({-6, -6}), make_vec({6, 6}), 128);
  CHECK(std::abs(integrate_M(e, big, [](const Vec& x) { return std::exp(-x.squaredNorm()); }, rule) - kPi) < 1e-6);
  CHECK(integrate_M(FinslerMetric::funk(2), Domain::box(make_vec({-0.5, -0.5}), make_vec({0.5, 0.5}), 16),
                    [](const Vec&) { return 0.0; }, rule) == 0.0);
  const auto unit = Domain::box(make_vec({0, 0}), make_vec({1, 1}), 16);
  CHECK(integrate_M(e, unit, [](const Vec&) { return 1.0; }, rule) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_SM(e, unit, [](const Vec&, const Vec&) { return 1.0; }, rule) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(integrate_SM(FinslerMetric::randers(make_vec({0.5, 0.0})), unit,
                     [](const Vec&, const Vec&) { return 1.0; }, rule) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  CHECK(std::abs(integrate_SM(e, big, [](const Vec& x, const Vec&) { return std::exp(-2.0 * x.squaredNorm()); }, rule) -
                 kPi * kPi) < 1e-6);
  CHECK_THROWS_AS(integrate_M(FinslerMetric::euclidean(3), unit, [](const Vec&) { return 1.0; },
                              FiberQuadrature::make(3, 8)),
                  ArgumentError);
}

TEST_CASE("theta-independent integrands: SM = c_{n-1} M") {
  gen::Rng rng(304);
  const auto rule = FiberQuadrature::make(2, 32);
  const auto domain = Domain::box(make_vec({-0.6, -0.6}), make_vec({0.6, 0.6}), 24);
  for (const auto& [name, m] : gen::zoo(2)) {
    CAPTURE(name);
    const auto u = rng.smooth_field(2, 1.2);
    const double sm = integrate_SM(m, domain, [&](const Vec& x, const Vec&) { return u(x) * u(x); }, rule);
    const double mm = integrate_M(m, domain, [&](const Vec& x) { return u(x) * u(x); }, rule);
    CHECK(sm == doctest::Approx(2.0 * kPi * mm).epsilon(1e-12));
  }
}

TEST_CASE("three-dimensional fiber integration") {
  const auto rule = FiberQuadrature::make(3, 12);
  const auto r = FinslerMetric::randers(make_vec({0.3, 0.0, 0.2}));
  // det g / F^3 = F for a = I on the unit sphere; the mean of F is 1
  CHECK(volume_density(r, Point{0.0, 0.0, 0.0}, rule) == doctest::Approx(1.0).epsilon(1e-12));
  const auto unit = Domain::box(make_vec({0, 0, 0}), make_vec({1, 1, 1}), 8);
  CHECK(integrate_SM(FinslerMetric::euclidean(3), unit, [](const Vec&, const Vec&) { return 1.0; }, rule) ==
        doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("radial projection Jacobian") {
  gen::Rng rng(305);
  const auto e = FinslerMetric::euclidean(2);
  for (int i = 0; i < 10; ++i) CHECK(radial_projection_jacobian(e, Point{0.0, 0.0}, rng.unit(2)) == doctest::Approx(1.0).epsilon(1e-9));
  const auto scaled = FinslerMetric::conformal(2, ConformalFactor::constant_value(2, std::log(2.0)));
  CHECK(radial_projection_jacobian(scaled, Point{0.0, 0.0}, make_vec({0.6, 0.8})) == doctest::Approx(2.0).epsilon(1e-9));
  const auto r = FinslerMetric::randers(make_vec({0.5, 0.0}));
  for (int i = 0; i < 36; ++i) {
    const double t = 2.0 * kPi * i / 36;
    const Vec th = make_vec({std::cos(t), std::sin(t)});
    const double J = radial_projection_jacobian(r, Point{0.0, 0.0}, th);
    CHECK(std::isfinite(J));
    CHECK(J > 0.0);
    // arc-length ratio of the polar curve rho = 1 / F(theta)
    const double F = 1.0 + 0.5 * std::cos(t);
    const double rho = 1.0 / F, drho = 0.5 * std::sin(t) / (F * F);
    CHECK(J == doctest::Approx(1.0 / std::sqrt(rho * rho + drho * drho)).epsilon(1e-8));
  }
  const auto e3 = FinslerMetric::euclidean(3);
  CHECK(radial_projection_jacobian(e3, Point{0.0, 0.0, 0.0}, make_vec({0, 0.6, 0.8})) == doctest::Approx(1.0).epsilon(1e-9));
  const auto s3 = FinslerMetric::conformal(3, ConformalFactor::constant_value(3, std::log(2.0)));
  CHECK(radial_projection_jacobian(s3, Point{0.0, 0.0, 0.0}, make_vec({0, 0.6, 0.8})) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("stry constant") {
  const auto box = Domain::box(make_vec({-1, -1}), make_vec({1, 1}), 16);
  CHECK(stry_constant(FinslerMetric::euclidean(2), box, 100) == doctest::Approx(2.0 * kPi).epsilon(1e-9));
  const auto r = FinslerMetric::randers(make_vec({0.5, 0.0}));
  const auto unit = Domain::box(make_vec({0, 0}), make_vec({1, 1}), 16);
  const double coarse = stry_constant(r, unit, 100);
  const double fine = stry_constant(r, unit, 400, 512);
  CHECK(coarse > 0.0);
  CHECK(std::abs(coarse - fine) <= 1e-6 * fine);
  // the quartic infimum sits on the axis e_2, where J sqrt(det g) = 1
  const double q = stry_constant(FinslerMetric::quartic(2, 0.1), box, 100);
  CHECK(q == doctest::Approx(2.0 * kPi).epsilon(1e-9));
  CHECK_THROWS_AS(stry_constant(r, unit, 10), ArgumentError);
}

TEST_CASE("SM integral dominates R times the M integral on random fields") {
  gen::Rng rng(306);
  const auto rule = FiberQuadrature::make(2, 32);
  for (const auto& [name, m] : gen::zoo(2)) {
    CAPTURE(name);
    const auto domain = m.kind() == MetricKind::Funk || m.kind() == MetricKind::ConformalRiemannian
                            ? Domain::box(make_vec({-0.5, -0.5}), make_vec({0.5, 0.5}), 24)
                            : Domain::box(make_vec({-2, -2}), make_vec({2, 2}), 24);
    const double R = stry_constant(m, domain, 100);
    REQUIRE(R > 0.0);
    for (int i = 0; i < 5; ++i) {
      const auto u = rng.smooth_field(2, domain.hi()[0] - domain.lo()[0]);
      const double sm = integrate_SM(m, domain, [&](const Vec& x, const Vec&) { return std::abs(u(x)); }, rule);
      const double mm = integrate_M(m, domain, [&](const Vec& x) { return std::abs(u(x)); }, rule);
      CHECK(sm >= R * mm - 1e-8);
    }
  }
}
