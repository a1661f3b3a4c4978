#include "pds/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace pds {

const char* to_string(Scheme s) {
  return s == Scheme::tangent_euler ? "tangent_euler" : "projected_euler";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::horizon_reached: return "horizon_reached";
    case Termination::equilibrium: return "equilibrium";
    case Termination::restoration_failure: return "restoration_failure";
    case Termination::step_floor: return "step_floor";
  }
  return "unknown";
}

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::none: return "none";
    case EquilibriumKind::weak_candidate: return "weak-candidate";
    case EquilibriumKind::strong_candidate: return "strong-candidate";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("integrator dt must be positive");
  if (!(dt_floor > 0.0) || dt_floor > dt) {
    throw std::invalid_argument("integrator requires 0 < dt_floor <= dt");
  }
  if (!(equil_tol > 0.0)) throw std::invalid_argument("equil_tol must be positive");
}

Vec Trajectory::at(double t) const {
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const size_t k = static_cast<size_t>(it - times.begin());
  const double t0 = times[k - 1], t1 = times[k];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * states[k - 1] + w * states[k];
}

namespace {

StepResult step_with_dt(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                        const Vec& x, const IntegratorConfig& cfg, double dt) {
  StepResult out;
  out.hit_floor = false;
  int retries = 0;
  while (true) {
    Vec v;
    Vec x_hat;
    if (cfg.scheme == Scheme::tangent_euler) {
      ProjectionResult r = project_field(S, g, f, x);
      v = r.primary();
      x_hat = x + dt * v;
    } else {
      x_hat = x + dt * f(x);
    }
    Vec x_next = S.restore(x_hat, g, &x);
    if (cfg.scheme == Scheme::projected_euler) v = (x_next - x) / dt;

    const double moved = (x_next - x_hat).norm();
    if (moved > dt * v.norm() + 1e-15) {
      if (dt * 0.5 >= cfg.dt_floor && ++retries <= cfg.max_restore) {
        dt *= 0.5;
        continue;
      }
      out.hit_floor = true;
    }
    out.x_next = std::move(x_next);
    out.v = std::move(v);
    out.dt_used = dt;
    return out;
  }
}

} // namespace

StepResult step(const FeasibleSet& S, const MetricField& g, const VectorField& f, const Vec& x,
                const IntegratorConfig& cfg) {
  cfg.validate();
  return step_with_dt(S, g, f, x, cfg, cfg.dt);
}

Trajectory integrate(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                     const Vec& x0, double horizon, const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;

  Vec x = S.member(x0) ? x0 : S.restore(x0, g, nullptr);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  std::vector<int> active = S.active_ids(x);
  traj.initial_active = active;

  double t = 0.0;
  int quiet_steps = 0;
  traj.termination = Termination::horizon_reached;

  while (t < horizon - 1e-15) {
    if (!g.is_euclidean()) {
      const MetricDiagnostics diag = g.diagnostics(x);
      traj.max_kappa = std::max(traj.max_kappa, diag.kappa);
      if (diag.kappa > cfg.kappa_warn) traj.kappa_warning = true;
    }

    const double dt_request = std::min(cfg.dt, horizon - t);
    StepResult sr;
    try {
      sr = step_with_dt(S, g, f, x, cfg, dt_request);
    } catch (const RestorationError&) {
      traj.termination = Termination::restoration_failure;
      break;
    }
    if (sr.hit_floor) {
      traj.termination = Termination::step_floor;
      break;
    }

    t += sr.dt_used;
    x = sr.x_next;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.velocities.push_back(sr.v);

    std::vector<int> now = S.active_ids(x);
    if (now != active) {
      traj.events.push_back({t, active, now});
      active = std::move(now);
    }

    if (g.norm(traj.states[traj.states.size() - 2], sr.v) <= cfg.equil_tol) {
      if (++quiet_steps >= 3) {
        traj.termination = Termination::equilibrium;
        break;
      }
    } else {
      quiet_steps = 0;
    }
  }
  return traj;
}

EquilibriumKind detect_equilibrium(const FeasibleSet& S, const MetricField& g,
                                   const VectorField& f, const Vec& x, double tol,
                                   double hull_radius, int hull_count, uint64_t seed) {
  ProjectionResult r = project_field(S, g, f, x);
  double min_branch_norm = std::numeric_limits<double>::infinity();
  for (const Vec& v : r.projected) min_branch_norm = std::min(min_branch_norm, g.norm(x, v));
  if (min_branch_norm > tol) return EquilibriumKind::none;

  std::mt19937_64 rng(seed);
  KrasovskiiHull hull = krasovskii_hull(S, g, f, x, hull_radius, hull_count, rng);
  for (const Vec& v : hull.vertices) {
    if (g.norm(x, v) > tol) return EquilibriumKind::weak_candidate;
  }
  return EquilibriumKind::strong_candidate;
}

std::string trajectory_to_csv(const Trajectory& traj, uint64_t seed) {
  std::ostringstream out;
  const int n = static_cast<int>(traj.states.front().size());
  out << "# seed=" << seed << "\n";
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < n; ++i) out << ",v" << i;
  out << ",active\n";

  char buf[32];
  auto put = [&](double value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << buf;
  };

  // Maps each trajectory time to the active ids recorded through the events.
  std::vector<int> active = traj.initial_active;
  size_t ev = 0;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    while (ev < traj.events.size() && traj.events[ev].time <= traj.times[k] + 1e-15) {
      active = traj.events[ev].after;
      ++ev;
    }
    put(traj.times[k]);
    for (int i = 0; i < n; ++i) {
      out << ",";
      put(traj.states[k][i]);
    }
    const Vec& v = traj.velocities.empty()
                       ? Vec(Vec::Zero(n))
                       : traj.velocities[std::min(k, traj.velocities.size() - 1)];
    for (int i = 0; i < n; ++i) {
      out << ",";
      put(v[i]);
    }
    out << ",";
    for (size_t i = 0; i < active.size(); ++i) out << (i ? "|" : "") << active[i];
    out << "\n";
  }
  out << "# termination=" << to_string(traj.termination) << "\n";
  return out.str();
}

} // namespace pds
