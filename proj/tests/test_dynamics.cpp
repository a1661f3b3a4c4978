#include "pds/scenarios.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace pds;
using namespace pds::testing;

namespace {

// Closed-form solution of the slide scenario: x2' = -(x2 + c) until the
// boundary {x2 >= 0} activates, then the state slides horizontally.
Vec slide_exact(double t, double c) {
  const double t_star = std::log((1.0 + c) / c);
  Vec x(2);
  x[0] = t;
  x[1] = t < t_star ? (1.0 + c) * std::exp(-t) - c : 0.0;
  return x;
}

VectorField slide_field(double c) {
  return VectorField([c](const Vec& x) { return vec2(1.0, -x[1] - c); }, "slide");
}

double max_norm_error(const Trajectory& traj, double c, double t_end) {
  double worst = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = t_end * k / 400.0;
    worst = std::max(worst, (traj.at(t) - slide_exact(t, 0.6)).norm());
    (void)c;
  }
  return worst;
}

} // namespace

TEST_CASE("interior step is plain Euler") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0); // x2 >= 0
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  const Vec x = vec2(0, 5);
  const auto sr = step(*S, MetricField::euclidean(), VectorField::constant(vec2(1, -1)), x, cfg);
  CHECK((sr.x_next - vec2(0.01, 4.99)).norm() < 1e-14);
  CHECK((sr.v - vec2(1, -1)).norm() < 1e-14);
}

TEST_CASE("boundary step slides along the constraint") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  // Projection of (1,-1) onto {v2 >= 0} by hand KKT: (1, 0).
  const auto sr =
      step(*S, MetricField::euclidean(), VectorField::constant(vec2(1, -1)), vec2(1, 0), cfg);
  CHECK((sr.v - vec2(1, 0)).norm() < 1e-12);
  CHECK((sr.x_next - vec2(1.01, 0)).norm() < 1e-12);
}

TEST_CASE("skew metric boundary step moves up the boundary") {
  auto S = SmoothInequalitySet::halfspace(vec2(1, 0), 0.0);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  const auto sr = step(*S, MetricField::constant(skew_metric()),
                       VectorField::constant(vec2(1, 0)), vec2(0, 0), cfg);
  CHECK((sr.v - vec2(0, 0.5)).norm() < 1e-10);
  CHECK((sr.x_next - vec2(0, 0.005)).norm() < 1e-10);
}

TEST_CASE("half-plane slide with an event near the crossing") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const Trajectory traj =
      integrate(*S, MetricField::euclidean(), VectorField::constant(vec2(1, -1)), vec2(0, 1),
                2.0, cfg);
  CHECK(traj.termination == Termination::horizon_reached);
  CHECK((traj.final_state() - vec2(2, 0)).norm() <= 5e-3);
  REQUIRE(traj.events.size() == 1);
  CHECK(traj.events[0].time == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(traj.events[0].after == std::vector<int>{0});

  // Feasibility along the whole trajectory.
  for (const Vec& s : traj.states) CHECK(S->member(s));
}

TEST_CASE("zero field terminates as an equilibrium") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  IntegratorConfig cfg;
  const Trajectory traj =
      integrate(*S, MetricField::euclidean(), VectorField::zero(2), vec2(0.5, 0.5), 10.0, cfg);
  CHECK(traj.termination == Termination::equilibrium);
  CHECK((traj.final_state() - vec2(0.5, 0.5)).norm() < 1e-14);
  CHECK(traj.times.back() < 0.1);
}

TEST_CASE("marble run tops are equilibria") {
  auto S = make_marble_run();
  IntegratorConfig cfg;
  for (int k : {0, 1, 2}) {
    const Vec p = marble_run_top(k);
    const Trajectory traj =
        integrate(*S, MetricField::euclidean(), VectorField::constant(vec2(0, 1)), p, 0.5, cfg);
    CHECK(traj.termination == Termination::equilibrium);
    for (const Vec& s : traj.states) CHECK((s - p).norm() < 1e-12);
  }
}

TEST_CASE("marble run slope start climbs to the top and stops") {
  auto S = make_marble_run();
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const Vec x0 = vec2(0.5, 1.0 / 3.0); // on the j=1 ascending segment
  const Trajectory traj =
      integrate(*S, MetricField::euclidean(), VectorField::constant(vec2(0, 1)), x0, 2.0, cfg);
  CHECK(traj.termination == Termination::equilibrium);
  CHECK((traj.final_state() - vec2(2.0 / 3.0, 2.0 / 3.0)).norm() < 1e-6);
}

TEST_CASE("velocities pass tangent-cone membership along the trajectory") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  const Trajectory traj =
      integrate(*S, MetricField::euclidean(), slide_field(0.6), vec2(0, 1), 2.0, cfg);

  std::vector<double> event_times;
  for (const auto& ev : traj.events) event_times.push_back(ev.time);

  for (size_t k = 0; k < traj.velocities.size(); ++k) {
    const auto cones = S->tangent_cones(traj.states[k]);
    const Vec& v = traj.velocities[k];
    bool in_cone = false;
    for (const auto& c : cones) in_cone = in_cone || c.contains(v, 1e-8);
    CHECK(in_cone);

    // Two-sided membership away from events.
    bool near_event = false;
    for (double te : event_times) {
      if (std::abs(traj.times[k] - te) <= 2 * cfg.dt) near_event = true;
    }
    if (!near_event) {
      bool reverse = false;
      for (const auto& c : cones) reverse = reverse || c.contains(Vec(-v), 1e-8);
      CHECK(reverse);
    }
  }
}

TEST_CASE("slide scenario converges at first order") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  const VectorField f = slide_field(0.6);
  std::vector<double> errors;
  for (double dt : {1e-2, 5e-3, 1e-3}) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    const Trajectory traj =
        integrate(*S, MetricField::euclidean(), f, vec2(0, 1), 2.0, cfg);
    CHECK((traj.final_state() - vec2(2, 0)).norm() <= 5 * dt);
    errors.push_back(max_norm_error(traj, 0.6, 2.0));
  }
  // Richardson halving between the two coarse runs: observed order >= 1.
  const double order = std::log2(errors[0] / errors[1]);
  CHECK(order >= 0.9);
  CHECK(errors[2] <= errors[0] * 0.2);
}

TEST_CASE("schemes agree to first order on a prox-regular scenario") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  const VectorField f = slide_field(0.6);
  IntegratorConfig tangent, projected;
  tangent.dt = projected.dt = 1e-3;
  projected.scheme = Scheme::projected_euler;
  const Trajectory a = integrate(*S, MetricField::euclidean(), f, vec2(0, 1), 2.0, tangent);
  const Trajectory b = integrate(*S, MetricField::euclidean(), f, vec2(0, 1), 2.0, projected);
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double t = 2.0 * k / 200.0;
    worst = std::max(worst, (a.at(t) - b.at(t)).norm());
  }
  CHECK(worst <= 20 * tangent.dt);
}

TEST_CASE("detect_equilibrium classifies the x-alpha origin") {
  const VectorField f = VectorField::constant(vec2(1, 0));
  const MetricField g = MetricField::euclidean();
  auto strong = make_x_alpha(0.3);
  auto weak = make_x_alpha(0.6);
  CHECK(detect_equilibrium(*strong, g, f, Vec::Zero(2), 1e-3, 1e-2, 256, 0) ==
        EquilibriumKind::strong_candidate);
  CHECK(detect_equilibrium(*weak, g, f, Vec::Zero(2), 1e-3, 1e-2, 256, 0) ==
        EquilibriumKind::weak_candidate);
}

TEST_CASE("detect_equilibrium on interior points") {
  auto S = SmoothInequalitySet::box(vec2(-1, -1), vec2(1, 1));
  const MetricField g = MetricField::euclidean();
  CHECK(detect_equilibrium(*S, g, VectorField::zero(2), vec2(0.2, 0.1), 1e-3, 1e-3, 64, 0) ==
        EquilibriumKind::strong_candidate);
  CHECK(detect_equilibrium(*S, g, VectorField::constant(vec2(1, 0)), vec2(0, 0), 1e-3, 1e-3, 64,
                           0) == EquilibriumKind::none);
}

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  cfg.dt_floor = cfg.dt * 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("weak-boundedness monitor flags ill-conditioned metrics") {
  auto S = SmoothInequalitySet::whole_space(2);
  const MetricField bad = MetricField::constant(mat2(1, 0, 0, 1e9));
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  const Trajectory traj =
      integrate(*S, bad, VectorField::constant(vec2(1, 0)), vec2(0, 0), 1.0, cfg);
  CHECK(traj.kappa_warning);
  CHECK(traj.max_kappa == doctest::Approx(1e9));

  const Trajectory fine =
      integrate(*S, MetricField::constant(skew_metric()), VectorField::constant(vec2(1, 0)),
                vec2(0, 0), 1.0, cfg);
  CHECK_FALSE(fine.kappa_warning);
  CHECK(fine.max_kappa == doctest::Approx(3.0));
}

TEST_CASE("trajectory CSV round trip shape") {
  auto S = SmoothInequalitySet::halfspace(vec2(0, -1), 0.0);
  IntegratorConfig cfg;
  cfg.dt = 0.25;
  const Trajectory traj =
      integrate(*S, MetricField::euclidean(), VectorField::constant(vec2(1, -1)), vec2(0, 1),
                1.5, cfg);
  const std::string csv = trajectory_to_csv(traj, 0);
  CHECK(csv.find("# seed=0\n") == 0);
  CHECK(csv.find("t,x0,x1,v0,v1,active\n") != std::string::npos);
  CHECK(csv.find("# termination=horizon_reached") != std::string::npos);
  // Determinism: identical serialization on repeat.
  CHECK(csv == trajectory_to_csv(traj, 0));
}
