#include "finsler/error.hpp"
#include "finsler/metric.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace finsler;

TEST_CASE("eval_F examples") {
  CHECK(eval_F(FinslerMetric::euclidean(2), {Point{0.0, 0.0}, make_vec({3, 4})}) == doctest::Approx(5.0).epsilon(1e-15));
  const auto randers = FinslerMetric::randers(make_vec({0.5, 0.0}));
  CHECK(eval_F(randers, {Point{7.0, -2.0}, make_vec({1, 0})}) == doctest::Approx(1.5).epsilon(1e-15));
  const auto funk = FinslerMetric::funk(2);
  CHECK(eval_F(funk, {Point{0.0, 0.0}, make_vec({1, 0})}) == doctest::Approx(1.0).epsilon(1e-15));
  // standard Funk expression at an off-center point
  const Vec x = make_vec({0.3, -0.2}), y = make_vec({0.4, 0.7});
  const double xy = x.dot(y), x2 = x.squaredNorm(), y2 = y.squaredNorm();
  const double expected = (std::sqrt(y2 - (x2 * y2 - xy * xy)) + xy) / (1.0 - x2);
  CHECK(funk.F(Point(x), y) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("F vanishes only at y = 0") {
  gen::Rng rng(101);
  for (const auto& [name, m] : gen::zoo(2)) {
    CAPTURE(name);
    const Point x(rng.point_for(m));
    CHECK(m.F(x, Vec::Zero(2)) == 0.0);
    for (int i = 0; i < 50; ++i) CHECK(m.F(x, rng.nonzero(2)) > 0.0);
  }
}

TEST_CASE("Funk refuses points outside the ball") {
  const auto funk = FinslerMetric::funk(2);
  CHECK_THROWS_AS((void)funk.F(Point{1.0, 0.0}, make_vec({1, 0})), DomainError);
  CHECK_THROWS_AS((void)funk.F(Point{0.8, 0.8}, make_vec({1, 0})), DomainError);
  CHECK_NOTHROW((void)funk.F(Point{0.99, 0.0}, make_vec({1, 0})));
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(FinslerMetric::randers(make_vec({1.0, 0.0})), Error);
  CHECK_THROWS_AS(FinslerMetric::quartic(2, 0.3), ArgumentError);
  CHECK_THROWS_AS(FinslerMetric::euclidean(4), Error);
}

TEST_CASE("fundamental tensor examples") {
  const Mat g = fundamental_tensor(FinslerMetric::euclidean(2), {Point{1.0, 2.0}, make_vec({0.3, -2})});
  CHECK((g - Mat::Identity(2, 2)).norm() < 1e-15);

  const auto randers = FinslerMetric::randers(make_vec({0.5, 0.0}));
  const Mat gr = fundamental_tensor(randers, {Point{0.0, 0.0}, make_vec({1, 0})});
  CHECK(gr(0, 0) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(gr(1, 1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(gr(0, 1)) < 1e-12);
  CHECK(gr.determinant() == doctest::Approx(3.375).epsilon(1e-12));

  // the analytic Randers tensor against the finite-difference Hessian
  const Vec y = make_vec({0.3, 0.8});
  const Mat fd = fd_fundamental_tensor([&](const Vec& v) { return randers.F(Point{0.0, 0.0}, v); }, y);
  CHECK((fd - randers.fundamental_tensor(Point{0.0, 0.0}, y)).norm() < 1e-8);
}

TEST_CASE("fundamental tensor is 0-homogeneous") {
  gen::Rng rng(102);
  for (const auto& [name, m] : gen::zoo(2)) {
    CAPTURE(name);
    for (int i = 0; i < 20; ++i) {
      const Point x(rng.point_for(m));
      const Vec y = rng.nonzero(2);
      const Mat g1 = m.fundamental_tensor(x, y);
      const Mat g2 = m.fundamental_tensor(x, Vec(2.0 * y));
      CHECK((g1 - g2).norm() <= 1e-10 * g1.norm());
    }
  }
}

TEST_CASE("Randers det g = (F/alpha)^{n+1} det a") {
  gen::Rng rng(103);
  for (int n : {2, 3}) {
    Mat a = Mat::Identity(n, n);
    a(0, 0) = 2.0;
    a(0, 1) = a(1, 0) = 0.3;
    Vec b = Vec::Zero(n);
    b[0] = 0.4;
    b[1] = -0.2;
    const auto m = FinslerMetric::randers(a, b);
    for (int i = 0; i < 100; ++i) {
      const Vec y = rng.nonzero(n);
      const double alpha = std::sqrt(y.dot(a * y));
      const double F = m.F(Point(Vec::Zero(n)), y);
      const double expected = std::pow(F / alpha, n + 1) * a.determinant();
      const double got = m.fundamental_tensor(Point(Vec::Zero(n)), y).determinant();
      CHECK(std::abs(got - expected) <= 1e-8 * expected);
    }
  }
}

TEST_CASE("metric axioms on random samples") {
  gen::Rng rng(104);
  for (int n : {1, 2, 3}) {
    for (const auto& [name, m] : gen::zoo(n)) {
      CAPTURE(name);
      CAPTURE(n);
      std::vector<TangentVector> samples;
      for (int i = 0; i < 100; ++i) samples.push_back({Point(rng.point_for(m)), rng.nonzero(n)});
      const std::vector<double> lambdas{0.5, 2.0, 10.0};
      CHECK(check_homogeneity(m, samples, lambdas).max_relative_deviation <= 1e-12);
      const auto t = check_fundamental_tensor(m, samples);
      CHECK(t.min_eigenvalue > 0.0);
      CHECK(t.max_asymmetry <= 1e-12);
    }
  }
}

TEST_CASE("homogeneity examples") {
  std::vector<TangentVector> s{{Point{0.3, 0.0}, make_vec({0.2, -0.7})}};
  CHECK(check_homogeneity(FinslerMetric::euclidean(2), s, std::vector<double>{0.5, 2.0, 10.0})
            .max_relative_deviation <= 1e-15);
  CHECK(check_homogeneity(FinslerMetric::randers(make_vec({0.5, 0.0})), s, std::vector<double>{0.5, 2.0, 10.0})
            .max_relative_deviation <= 1e-14);
  CHECK(check_homogeneity(FinslerMetric::funk(2), s, std::vector<double>{3.0}).max_relative_deviation <= 1e-13);
}

TEST_CASE("reverse_metric") {
  const auto e = FinslerMetric::euclidean(2);
  const auto er = reverse_metric(e);
  CHECK(er.F(Point{0.0, 0.0}, make_vec({1, 2})) == e.F(Point{0.0, 0.0}, make_vec({1, 2})));

  const auto r = FinslerMetric::randers(make_vec({0.5, 0.0}));
  const auto rr = reverse_metric(r);
  const auto flipped = FinslerMetric::randers(make_vec({-0.5, 0.0}));
  gen::Rng rng(105);
  for (int i = 0; i < 50; ++i) {
    const Vec y = rng.nonzero(2);
    CHECK(rr.F(Point{0.0, 0.0}, y) == doctest::Approx(flipped.F(Point{0.0, 0.0}, y)).epsilon(1e-15));
  }
  CHECK(rr.closed_form_distance(Point{0.0, 0.0}, Point{1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));

  // involution
  for (const auto& [name, m] : gen::zoo(2)) {
    const auto twice = reverse_metric(reverse_metric(m));
    for (int i = 0; i < 20; ++i) {
      const Point x(rng.point_for(m));
      const Vec y = rng.nonzero(2);
      CHECK(std::abs(twice.F(x, y) - m.F(x, y)) <= 1e-15 * m.F(x, y));
    }
  }
}

TEST_CASE("reversibility defect") {
  const std::vector<Point> pts{Point{0.0, 0.0}, Point{0.5, -0.3}};
  CHECK(reversibility_defect(FinslerMetric::euclidean(2), pts) == 0.0);
  CHECK(reversibility_defect(FinslerMetric::quartic(2, 0.1), pts) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(reversibility_defect(FinslerMetric::randers(make_vec({0.5, 0.0})), pts) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(FinslerMetric::quartic(2, 0.1).reversible());
  CHECK_FALSE(FinslerMetric::funk(2).reversible());
  CHECK_FALSE(FinslerMetric::quartic(2, 0.1).riemannian());
}

TEST_CASE("require_spd rejects indefinite matrices") {
  Mat g = Mat::Identity(2, 2);
  g(1, 1) = -1.0;
  CHECK_THROWS_AS(require_spd(g, "test"), MetricValidityError);
  CHECK_NOTHROW(require_spd(Mat::Identity(2, 2), "test"));
}
