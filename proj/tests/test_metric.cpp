#include "pds/flows.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace pds;
using namespace pds::testing;

TEST_CASE("inner product values") {
  const Vec x = vec2(0, 0);
  CHECK(MetricField::euclidean().inner(x, vec2(1, 0), vec2(0, 1)) == doctest::Approx(0.0));

  const MetricField diag = MetricField::constant(mat2(1, 0, 0, 4));
  CHECK(diag.inner(x, vec2(0, 1), vec2(0, 1)) == doctest::Approx(4.0));

  const MetricField skew = MetricField::constant(skew_metric());
  CHECK(skew.inner(x, vec2(1, 0), vec2(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("inner product is bilinear and symmetric on samples") {
  const MetricField g = MetricField::constant(skew_metric());
  std::mt19937_64 rng(7);
  const Vec x = vec2(0.3, -0.2);
  for (int i = 0; i < 50; ++i) {
    const Vec u = random_unit(2, rng), v = random_unit(2, rng), w = random_unit(2, rng);
    CHECK(g.inner(x, u, v) == doctest::Approx(g.inner(x, v, u)));
    CHECK(g.inner(x, u + w, v) == doctest::Approx(g.inner(x, u, v) + g.inner(x, w, v)));
    CHECK(g.inner(x, 2.5 * u, v) == doctest::Approx(2.5 * g.inner(x, u, v)));
  }
}

TEST_CASE("diagnostics eigenvalues and condition number") {
  const Vec x = vec2(1, 1);
  auto d = MetricField::euclidean().diagnostics(x);
  CHECK(d.lambda_min == doctest::Approx(1.0));
  CHECK(d.lambda_max == doctest::Approx(1.0));
  CHECK(d.kappa == doctest::Approx(1.0));

  d = MetricField::constant(mat2(1, 0, 0, 4)).diagnostics(x);
  CHECK(d.lambda_min == doctest::Approx(1.0));
  CHECK(d.lambda_max == doctest::Approx(4.0));
  CHECK(d.kappa == doctest::Approx(4.0));

  // Eigenvalues of [[2,1],[1,2]] from its characteristic polynomial: 1 and 3.
  d = MetricField::constant(skew_metric()).diagnostics(x);
  CHECK(d.lambda_min == doctest::Approx(1.0));
  CHECK(d.lambda_max == doctest::Approx(3.0));
  CHECK(d.kappa == doctest::Approx(3.0));
}

TEST_CASE("definiteness violations raise") {
  const Vec x = vec2(0, 0);
  CHECK_THROWS_AS(MetricField::constant(mat2(1, 0, 0, -1)).matrix(x), DefinitenessError);
  CHECK_THROWS_AS(MetricField::constant(mat2(1, 0.5, -0.5, 1)).matrix(x), DefinitenessError);
  CHECK_THROWS_AS(MetricField::constant(mat2(1, 2, 2, 1)).matrix(x), DefinitenessError);
}

TEST_CASE("hessian metric") {
  SUBCASE("isotropic quadratic gives the identity") {
    ScalarField psi([](const Vec& x) { return 0.5 * x.squaredNorm(); });
    const Mat G = hessian_metric(psi).matrix(vec2(0.7, -0.3));
    CHECK((G - Mat::Identity(2, 2)).norm() < 1e-6);
  }
  SUBCASE("diagonal quadratic") {
    ScalarField psi = ScalarField::quadratic(mat2(2, 0, 0, 8), vec2(0, 0));
    const Mat G = hessian_metric(psi).matrix(vec2(1, 2));
    CHECK((G - mat2(2, 0, 0, 8)).norm() < 1e-12);
  }
  SUBCASE("quartic-quadratic potential") {
    // psi = x1^4/12 + x2^2/2 has hessian diag(x1^2, 1).
    ScalarField psi(
        [](const Vec& x) { return std::pow(x[0], 4) / 12.0 + 0.5 * x[1] * x[1]; },
        [](const Vec& x) { return vec2(std::pow(x[0], 3) / 3.0, x[1]); });
    const Mat G = hessian_metric(psi).matrix(vec2(1, 0));
    CHECK((G - Mat::Identity(2, 2)).norm() < 1e-4);
    CHECK_THROWS_AS(hessian_metric(psi).matrix(vec2(0, 0)), DefinitenessError);
  }
}

TEST_CASE("norm equivalence bounds on random vectors") {
  const MetricField g = MetricField::constant(skew_metric());
  const Vec x = vec2(0, 0);
  const auto d = g.diagnostics(x);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec v = 3.0 * random_unit(2, rng);
    const double gn2 = g.inner(x, v, v);
    CHECK(gn2 >= d.lambda_min * v.squaredNorm() - 1e-12);
    CHECK(gn2 <= d.lambda_max * v.squaredNorm() + 1e-12);
  }
}

TEST_CASE("projection is invariant under metric rescaling") {
  // Scaling the metric by 1/lambda_max leaves the projected field unchanged.
  auto S = SmoothInequalitySet::halfspace(vec2(1, 0), 0.0);
  const Mat G = skew_metric();
  const MetricField g = MetricField::constant(G);
  const double lmax = g.diagnostics(vec2(0, 0)).lambda_max;
  const MetricField g_scaled = MetricField::constant(G / lmax);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) {
    const Vec f = 2.0 * random_unit(2, rng);
    const Vec x = vec2(0.0, i * 0.1 - 1.0);
    const VectorField field = VectorField::constant(f);
    const Vec v1 = project_field(*S, g, field, x).primary();
    const Vec v2 = project_field(*S, g_scaled, field, x).primary();
    CHECK((v1 - v2).norm() < 1e-9);
  }
}
