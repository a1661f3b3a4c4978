#pragma once

#include "pds/projection.hpp"

#include <random>

namespace pds {

enum class Scheme { tangent_euler, projected_euler };
enum class Termination { horizon_reached, equilibrium, restoration_failure, step_floor };

const char* to_string(Scheme s);
const char* to_string(Termination t);

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::tangent_euler;
  double equil_tol = 1e-8;
  int max_restore = 60;
  double dt_floor = 1e-6;
  double kappa_warn = 1e8; // weak-boundedness monitor threshold (warning only)

  void validate() const;
};

struct TrajectoryEvent {
  double time;
  std::vector<int> before;
  std::vector<int> after;
};

struct Trajectory {
  std::vector<double> times;       // t_0 = 0, strictly increasing
  std::vector<Vec> states;         // one per time
  std::vector<Vec> velocities;     // one per step (projected field used)
  std::vector<TrajectoryEvent> events;
  std::vector<int> initial_active; // active ids at the start state
  Termination termination = Termination::horizon_reached;
  double max_kappa = 1.0;
  bool kappa_warning = false;

  const Vec& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
  /// Piecewise-linear state at time t (clamped to [0, final_time]).
  Vec at(double t) const;
};

struct StepResult {
  Vec x_next;
  Vec v;
  double dt_used;
  bool hit_floor; // restoration displaced the point too far even at dt_floor
};

/// One explicit Euler step with feasibility restoration. The step is halved
/// down to dt_floor whenever restoration moves the point by more than dt|v|.
StepResult step(const FeasibleSet& S, const MetricField& g, const VectorField& f, const Vec& x,
                const IntegratorConfig& cfg);

Trajectory integrate(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                     const Vec& x0, double horizon, const IntegratorConfig& cfg);

enum class EquilibriumKind { none, weak_candidate, strong_candidate };
const char* to_string(EquilibriumKind k);

/// Classifies x by the projected field and a small-radius Krasovskii hull:
/// none when every branch moves, strong-candidate when the whole hull is
/// below tol, weak-candidate otherwise. Candidates only; uniqueness is
/// probed separately.
EquilibriumKind detect_equilibrium(const FeasibleSet& S, const MetricField& g,
                                   const VectorField& f, const Vec& x, double tol,
                                   double hull_radius = 1e-2, int hull_count = 256,
                                   uint64_t seed = 0);

/// CSV serialization: header t,x0..,v0..,active; one row per time point; the
/// last row repeats the final step velocity. Trailing comment carries the
/// termination cause.
std::string trajectory_to_csv(const Trajectory& traj, uint64_t seed);

} // namespace pds
