#pragma once

#include "pds/analysis.hpp"
#include "pds/charts.hpp"
#include "pds/flows.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace pds {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Built-in irregular sets
// ---------------------------------------------------------------------------

/// Self-similar union of slope +-2 segments accumulating at the origin, with
/// segment tops on the |x2| = |x1| diagonals. The tangent cone at 0 is the
/// nonconvex double sector {|v2| <= |v1|}.
std::shared_ptr<OracleSet> make_marble_run();

/// Marble-run segment top (2/3^(1+2k), 2/3^(1+2k)); an isolated equilibrium
/// of the vertical field.
Vec marble_run_top(int k);

/// X_alpha = {(x1,x2) | |x2| >= max(0,x1)^alpha}, 0 < alpha < 1. The
/// neighborhood sampler draws from the boundary curves (the set's essential
/// feature for prox/uniqueness estimation).
std::shared_ptr<OracleSet> make_x_alpha(double alpha);

// ---------------------------------------------------------------------------
// Sphere scenario (two stereographic charts)
// ---------------------------------------------------------------------------

struct SphereData {
  Vec cap_axis;          // unit axis of the excluded spherical cap
  double cap_cos = 0.5;  // feasible: <p, axis> <= cap_cos
  Vec omega;             // ambient rotation field omega x p
  double switch_norm = 2.0;

  Vec embed(int chart, const Vec& y) const;        // chart coords -> sphere
  Mat embed_jacobian(int chart, const Vec& y) const; // 3x2
  Vec to_chart(int chart, const Vec& p) const;     // sphere -> chart coords
  int preferred_chart(const Vec& p) const;         // smaller coordinate norm

  std::shared_ptr<SmoothInequalitySet> chart_set(int chart) const;
  MetricField chart_metric(int chart) const; // round metric, conformal factor
  VectorField chart_field(int chart) const;  // pushforward of omega x p
};

struct SphereTrajectory {
  Trajectory ambient;  // 3-D states and velocities on the sphere
  std::vector<std::pair<double, int>> chart_switches; // (time, new chart)
};

/// Integrates the projected rotation flow on the notched sphere, switching
/// stereographic charts when the coordinate norm exceeds switch_norm.
SphereTrajectory sphere_integrate(const SphereData& data, const Vec& p0_ambient, double horizon,
                                  const IntegratorConfig& cfg);

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

struct ExpectedAssertion {
  std::string kind;
  json params;
};

struct AssertionOutcome {
  std::string kind;
  bool passed;
  std::string detail;
};

struct Scenario {
  std::string name;
  int dim = 2;
  std::shared_ptr<const FeasibleSet> set;
  MetricField metric;
  VectorField field;
  std::optional<ScalarField> potential;
  std::vector<Vec> initial_points;
  double horizon = 1.0;
  IntegratorConfig integrator;
  uint64_t seed = 0;
  std::vector<ExpectedAssertion> expected;
  std::optional<SphereData> sphere; // atlas-driven simulation when present
  json config;                      // canonical serialized form

  /// Plain integration in scenario coordinates; sphere scenarios return the
  /// ambient 3-D trajectory.
  Trajectory simulate(const Vec& x0) const;
  /// Runs every expected assertion against a fresh simulation.
  std::vector<AssertionOutcome> verify() const;
};

std::vector<Scenario> builtin_scenarios();

/// Looks up a builtin by name ("x-alpha:<a>" parses the parameter).
std::optional<Scenario> find_builtin(const std::string& name);

Scenario scenario_from_json(const json& config);
json scenario_to_json(const Scenario& scenario);

} // namespace pds
