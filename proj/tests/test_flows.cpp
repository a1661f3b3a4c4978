#include "pds/nnls.hpp"
#include "pds/scenarios.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace pds;
using namespace pds::testing;

TEST_CASE("gradient field under different metrics") {
  ScalarField psi([](const Vec& x) { return 0.5 * x.squaredNorm(); });
  SUBCASE("euclidean gradient is the identity field") {
    const VectorField f = grad_field(psi, MetricField::euclidean());
    CHECK((f(vec2(0.3, -0.7)) - vec2(0.3, -0.7)).norm() < 1e-9);
  }
  SUBCASE("diagonal metric rescales componentwise") {
    const VectorField f = grad_field(psi, MetricField::constant(mat2(1, 0, 0, 4)));
    CHECK((f(vec2(1, 1)) - vec2(1, 0.25)).norm() < 1e-9);
  }
  SUBCASE("hessian metric turns the gradient into the Newton direction") {
    ScalarField quad = ScalarField::quadratic(mat2(3, 1, 1, 2), vec2(0, 0));
    const VectorField f = grad_field(quad, hessian_metric(quad));
    const Vec x = vec2(0.4, -1.2);
    CHECK((f(x) - x).norm() < 1e-9);
  }
}

TEST_CASE("gradient satisfies the duality pairing against finite differences") {
  ScalarField psi([](const Vec& x) {
    return 0.25 * std::pow(x[0], 4) + 0.5 * x[1] * x[1] + 0.3 * x[0] * x[1];
  });
  const MetricField g = MetricField::constant(skew_metric());
  const VectorField grad = grad_field(psi, g);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vec x = 1.5 * random_unit(2, rng);
    const Vec w = random_unit(2, rng);
    // <grad_g psi, w>_g = D psi (w), with D psi from central differences.
    const double h = 1e-6;
    const double directional = (psi.value(x + h * w) - psi.value(x - h * w)) / (2 * h);
    CHECK(g.inner(x, grad(x), w) == doctest::Approx(directional).epsilon(1e-6));
  }
}

TEST_CASE("projected gradient flow reaches the box face minimizer") {
  auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
  ScalarField psi = ScalarField::quadratic(Mat::Identity(2, 2), vec2(2.0, 0.5));
  const Flow flow = projected_gradient_flow(S, MetricField::euclidean(), psi);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.equil_tol = 1e-9;
  const Trajectory traj = flow.run(vec2(0.2, 0.5), 20.0, cfg);
  CHECK((traj.final_state() - vec2(1.0, 0.5)).norm() < 1e-6);
}

TEST_CASE("unconstrained quadratic flow decays exponentially") {
  auto S = SmoothInequalitySet::whole_space(2);
  ScalarField psi = ScalarField::quadratic(Mat::Identity(2, 2), vec2(0, 0));
  const Flow flow = projected_gradient_flow(S, MetricField::euclidean(), psi);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const Vec x0 = vec2(1, -2);
  const Trajectory traj = flow.run(x0, 3.0, cfg);
  for (int k = 0; k <= 30; ++k) {
    const double t = 3.0 * k / 30.0;
    CHECK((traj.at(t) - std::exp(-t) * x0).norm() < 10 * cfg.dt);
  }
}

TEST_CASE("newton flow on a quadratic is the linear decay x' = -x") {
  auto S = SmoothInequalitySet::whole_space(2);
  ScalarField psi = ScalarField::quadratic(mat2(3, 1, 1, 2), vec2(0, 0));
  const Flow flow = newton_flow(S, psi);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const Vec x0 = vec2(1.5, -1.0);
  const Trajectory traj = flow.run(x0, 3.0, cfg);
  for (int k = 0; k <= 30; ++k) {
    const double t = 3.0 * k / 30.0;
    CHECK((traj.at(t) - std::exp(-t) * x0).norm() <= 10 * cfg.dt);
  }
}

TEST_CASE("newton flow rejects non-convex potentials") {
  auto S = SmoothInequalitySet::whole_space(2);
  ScalarField psi(
      [](const Vec& x) { return std::pow(x[0], 4) / 12.0 + 0.5 * x[1] * x[1]; },
      [](const Vec& x) { return vec2(std::pow(x[0], 3) / 3.0, x[1]); });
  const Flow flow = newton_flow(S, psi);
  CHECK_THROWS_AS(flow.field(vec2(0.0, 0.5)), DefinitenessError);
}

TEST_CASE("newton and gradient flows share the constrained minimizer") {
  auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
  ScalarField psi = ScalarField::quadratic(mat2(2, 0.5, 0.5, 1), vec2(1.6, 0.4));
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.equil_tol = 1e-9;
  const Trajectory newton = newton_flow(S, psi).run(vec2(0.2, 0.8), 20.0, cfg);
  const Trajectory gradient =
      projected_gradient_flow(S, MetricField::euclidean(), psi).run(vec2(0.2, 0.8), 20.0, cfg);
  // Both reach the KKT point (1, 0.7).
  CHECK((newton.final_state() - vec2(1.0, 0.7)).norm() < 1e-4);
  CHECK((gradient.final_state() - newton.final_state()).norm() < 1e-4);
}

TEST_CASE("newton flow outpaces the gradient flow on ill-conditioned potentials") {
  // Interior minimizer: the gradient flow decays at the smallest eigenvalue
  // rate while the Newton flow contracts isotropically.
  auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
  ScalarField psi = ScalarField::quadratic(mat2(4, 0, 0, 0.25), vec2(0.6, 0.55));
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.equil_tol = 1e-8;
  const Trajectory newton = newton_flow(S, psi).run(vec2(0.05, 0.95), 80.0, cfg);
  const Trajectory gradient =
      projected_gradient_flow(S, MetricField::euclidean(), psi).run(vec2(0.05, 0.95), 80.0, cfg);
  CHECK((newton.final_state() - vec2(0.6, 0.55)).norm() < 1e-6);
  CHECK((gradient.final_state() - vec2(0.6, 0.55)).norm() < 1e-6);
  CHECK(newton.termination == Termination::equilibrium);
  CHECK(gradient.termination == Termination::equilibrium);
  CHECK(newton.times.size() * 2 < gradient.times.size());
}

TEST_CASE("three-dimensional box flow reaches the enumeration-oracle minimizer") {
  auto S = SmoothInequalitySet::box(vec3(0, 0, 0), vec3(1, 1, 1));
  Mat Q(3, 3);
  Q << 2, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0;
  const Vec target = vec3(1.4, 0.5, -0.3);
  ScalarField psi = ScalarField::quadratic(Q, target);
  const Flow flow = projected_gradient_flow(S, MetricField::euclidean(), psi);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.equil_tol = 1e-9;
  const Trajectory traj = flow.run(vec3(0.5, 0.5, 0.5), 40.0, cfg);

  // Exhaustive active-subset oracle over the six box faces.
  Mat A(6, 3);
  A.topRows(3) = -Mat::Identity(3, 3);
  A.bottomRows(3) = Mat::Identity(3, 3);
  Vec b(6);
  b << 0, 0, 0, 1, 1, 1;
  Vec best = target;
  double best_val = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << 6); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < 6; ++i) {
      if (mask & (1 << i)) rows.push_back(i);
    }
    if (rows.size() > 3) continue;
    const int k = static_cast<int>(rows.size());
    Mat kkt = Mat::Zero(3 + k, 3 + k);
    kkt.topLeftCorner(3, 3) = Q;
    Vec rhs(3 + k);
    rhs.head(3) = Q * target;
    for (int r = 0; r < k; ++r) {
      kkt.block(3 + r, 0, 1, 3) = A.row(rows[r]);
      kkt.block(0, 3 + r, 3, 1) = A.row(rows[r]).transpose();
      rhs[3 + r] = b[rows[r]];
    }
    Eigen::FullPivLU<Mat> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Vec sol = lu.solve(rhs);
    const Vec x = sol.head(3);
    if (k > 0 && sol.tail(k).minCoeff() < -1e-10) continue;
    if ((A * x - b).maxCoeff() > 1e-9) continue;
    const double val = 0.5 * (x - target).dot(Q * (x - target));
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  CHECK((traj.final_state() - best).norm() < 1e-5);
}

TEST_CASE("moreau equality holds on every flow step") {
  auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
  ScalarField psi = ScalarField::quadratic(mat2(2, 0.5, 0.5, 1), vec2(1.6, 0.4));
  const Flow flow = newton_flow(S, psi);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  const Trajectory traj = flow.run(vec2(0.2, 0.8), 3.0, cfg);
  for (size_t k = 0; k < traj.velocities.size(); ++k) {
    const Vec& x = traj.states[k];
    const Vec& v = traj.velocities[k];
    const Vec fx = flow.field(x);
    const double lhs = flow.metric.inner(x, fx, v);
    const double rhs = flow.metric.inner(x, v, v);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + fx.squaredNorm()));
  }
}

TEST_CASE("krasovskii samples satisfy the hull inequality") {
  // <f(x), w>_g >= |w|_g^2 for hull vertices w. The inequality concerns the
  // limit hull, so the sampling radius must keep the field variation below
  // the tolerance.
  auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
  ScalarField psi = ScalarField::quadratic(Mat::Identity(2, 2), vec2(2.0, 0.5));
  const Flow flow = projected_gradient_flow(S, MetricField::euclidean(), psi);
  std::mt19937_64 rng(19);
  for (const Vec& x : {vec2(1.0, 0.5), vec2(1.0, 1.0), vec2(0.5, 1.0)}) {
    const Vec fx = flow.field(x);
    const auto hull = krasovskii_hull(*S, flow.metric, flow.field, x, 1e-7, 128, rng);
    for (const Vec& w : hull.vertices) {
      CHECK(flow.metric.inner(x, fx, w) >= flow.metric.inner(x, w, w) - 1e-6);
    }
  }

  // With a constant field the inequality is exact at any radius; the marble
  // run hull carries it with equality on the projection branches.
  auto marble = make_marble_run();
  const VectorField vertical = VectorField::constant(vec2(0, 1));
  const auto hull =
      krasovskii_hull(*marble, MetricField::euclidean(), vertical, Vec::Zero(2), 0.1, 256, rng);
  for (const Vec& w : hull.vertices) {
    CHECK(vec2(0, 1).dot(w) >= w.squaredNorm() - 1e-9);
  }
}

TEST_CASE("terminal stationarity of the projected gradient flow") {
  auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
  ScalarField psi = ScalarField::quadratic(Mat::Identity(2, 2), vec2(2.0, 0.5));
  const Flow flow = projected_gradient_flow(S, MetricField::euclidean(), psi);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.equil_tol = 1e-9;
  const Trajectory traj = flow.run(vec2(0.2, 0.5), 25.0, cfg);
  const Vec xT = traj.final_state();
  const Vec w = flow.field(xT); // -grad
  const std::vector<Vec> gens = S->normal_generators(xT, flow.metric);
  Vec proj = Vec::Zero(2);
  if (!gens.empty()) proj = nnls_project(gens, Mat::Identity(2, 2), w).point;
  CHECK((w - proj).norm() <= 1e-5);
}

TEST_CASE("normal cone step matches the tangent Euler step") {
  IntegratorConfig cfg;
  cfg.dt = 0.01;

  SUBCASE("interior point") {
    auto S = SmoothInequalitySet::box(vec2(0, 0), vec2(1, 1));
    const VectorField f = VectorField::constant(vec2(0.3, -0.1));
    const Vec got = normal_cone_step(*S, MetricField::euclidean(), f, vec2(0.5, 0.5), cfg.dt);
    CHECK((got - vec2(0.503, 0.499)).norm() < 1e-12);
  }
  SUBCASE("skew-metric half-plane boundary") {
    auto S = SmoothInequalitySet::halfspace(vec2(1, 0), 0.0);
    const MetricField g = MetricField::constant(skew_metric());
    const VectorField f = VectorField::constant(vec2(1, 0));
    const Vec got = normal_cone_step(*S, g, f, vec2(0, 0), cfg.dt);
    const auto sr = step(*S, g, f, vec2(0, 0), cfg);
    CHECK((got - sr.x_next).norm() < 1e-9);
    CHECK((got - vec2(0, 0.005)).norm() < 1e-9);
  }
  SUBCASE("corner with the field inside the normal cone is stationary") {
    auto S = SmoothInequalitySet::box(vec2(-1, -1), vec2(0, 0));
    const VectorField f = VectorField::constant(vec2(1, 1));
    const Vec got = normal_cone_step(*S, MetricField::euclidean(), f, vec2(0, 0), cfg.dt);
    CHECK((got - vec2(0, 0)).norm() < 1e-12);
  }
  SUBCASE("agreement along a sliding trajectory") {
    auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
    const VectorField f([](const Vec& x) { return vec2(1.0, -x[1] - 0.6); }, "slide");
    Vec x = vec2(0.2, 0.01);
    for (int k = 0; k < 50; ++k) {
      const Vec via_normal = normal_cone_step(*S, MetricField::euclidean(), f, x, cfg.dt);
      const auto sr = step(*S, MetricField::euclidean(), f, x, cfg);
      CHECK((via_normal - sr.x_next).norm() < 1e-9);
      x = sr.x_next;
    }
  }
}
