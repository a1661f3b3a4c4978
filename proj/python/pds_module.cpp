#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pds/scenarios.hpp"

namespace py = pybind11;
using namespace pds;

namespace {

Scenario resolve(const std::string& ref) {
  if (!ref.empty() && ref.front() == '{') {
    return scenario_from_json(json::parse(ref));
  }
  if (auto sc = find_builtin(ref)) return std::move(*sc);
  throw std::invalid_argument("unknown scenario: " + ref);
}

py::object json_to_py(const json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

py::dict trajectory_to_dict(const Trajectory& traj) {
  const size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  Mat states(traj.states.size(), n);
  for (size_t k = 0; k < traj.states.size(); ++k) states.row(k) = traj.states[k].transpose();
  Mat velocities(traj.velocities.size(), n);
  for (size_t k = 0; k < traj.velocities.size(); ++k)
    velocities.row(k) = traj.velocities[k].transpose();
  Vec times(traj.times.size());
  for (size_t k = 0; k < traj.times.size(); ++k) times[k] = traj.times[k];

  py::list events;
  for (const auto& ev : traj.events) {
    events.append(py::make_tuple(ev.time, ev.before, ev.after));
  }
  py::dict out;
  out["times"] = times;
  out["states"] = states;
  out["velocities"] = velocities;
  out["events"] = events;
  out["termination"] = to_string(traj.termination);
  return out;
}

} // namespace

PYBIND11_MODULE(_pdsim, m) {
  m.doc() = "projected dynamical systems on constraint-defined and oracle-defined sets";

  m.def("scenario_names", [] {
    std::vector<std::string> names;
    for (const Scenario& sc : builtin_scenarios()) names.push_back(sc.name);
    return names;
  });

  m.def("scenario_config",
        [](const std::string& ref) { return json_to_py(scenario_to_json(resolve(ref))); });

  m.def(
      "project",
      [](const std::string& ref, const Vec& point) {
        Scenario sc = resolve(ref);
        ProjectionResult r = project_field(*sc.set, sc.metric, sc.field, point);
        py::dict out;
        out["v"] = r.primary();
        out["eta"] = r.normal_part;
        py::dict alpha;
        for (const auto& [idx, val] : r.active_multipliers) {
          alpha[py::str(std::to_string(idx))] = val;
        }
        out["alpha"] = alpha;
        out["branches"] = r.projected.size();
        py::list minimizers;
        for (const Vec& v : r.projected) minimizers.append(v);
        out["branch_minimizers"] = minimizers;
        return out;
      },
      py::arg("scenario"), py::arg("point"));

  m.def(
      "simulate",
      [](const std::string& ref, double dt, double horizon, const std::string& scheme,
         int point_index) {
        Scenario sc = resolve(ref);
        if (dt > 0) {
          sc.integrator.dt = dt;
          sc.integrator.dt_floor = std::min(sc.integrator.dt_floor, dt * 1e-3);
        }
        if (horizon > 0) sc.horizon = horizon;
        if (!scheme.empty()) {
          sc.integrator.scheme =
              scheme == "projected_euler" ? Scheme::projected_euler : Scheme::tangent_euler;
        }
        return trajectory_to_dict(sc.simulate(sc.initial_points.at(point_index)));
      },
      py::arg("scenario"), py::arg("dt") = 0.0, py::arg("horizon") = 0.0,
      py::arg("scheme") = "", py::arg("point_index") = 0);

  m.def(
      "moreau_check",
      [](const std::string& ref, const Vec& point) {
        Scenario sc = resolve(ref);
        const Vec fx = sc.field(point);
        const ProjectionResult r = project_field(*sc.set, sc.metric, sc.field, point);
        const MoreauReport rep = moreau_check(r, sc.metric, point, fx);
        py::dict out;
        out["value_residuals"] = rep.value_residuals;
        out["orth_residuals"] = rep.orth_residuals;
        out["bound"] = rep.bound;
        out["ok"] = rep.ok;
        return out;
      },
      py::arg("scenario"), py::arg("point"));

  m.def(
      "prox_estimate",
      [](const std::string& ref, const Vec& point, const std::vector<double>& radii, int samples,
         uint64_t seed) {
        Scenario sc = resolve(ref);
        ProxReport rep = prox_estimate(*sc.set, sc.metric, point, radii, samples, seed);
        py::dict out;
        out["point"] = rep.point;
        out["radii"] = rep.radii;
        out["l_estimates"] = rep.L_estimates;
        out["verdict"] = to_string(rep.verdict);
        return out;
      },
      py::arg("scenario"), py::arg("point"), py::arg("radii"), py::arg("samples") = 2000,
      py::arg("seed") = 0);

  m.def(
      "one_sided_lipschitz",
      [](const std::string& ref, const Vec& point, double radius, int samples, uint64_t seed) {
        Scenario sc = resolve(ref);
        return one_sided_lipschitz(*sc.set, sc.metric, sc.field, point, radius, samples, seed);
      },
      py::arg("scenario"), py::arg("point"), py::arg("radius") = 0.1, py::arg("samples") = 400,
      py::arg("seed") = 0);

  m.def(
      "equivalence_residual",
      [](const std::string& ref, const Vec& point, double radius, int samples, uint64_t seed) {
        Scenario sc = resolve(ref);
        return equivalence_residual(*sc.set, sc.metric, sc.field, point, radius, samples, seed);
      },
      py::arg("scenario"), py::arg("point"), py::arg("radius") = 0.05, py::arg("samples") = 256,
      py::arg("seed") = 0);

  m.def(
      "detect_equilibrium",
      [](const std::string& ref, const Vec& point, double tol, double radius, uint64_t seed) {
        Scenario sc = resolve(ref);
        return std::string(
            to_string(detect_equilibrium(*sc.set, sc.metric, sc.field, point, tol, radius, 256,
                                         seed)));
      },
      py::arg("scenario"), py::arg("point"), py::arg("tol") = 1e-3, py::arg("radius") = 1e-2,
      py::arg("seed") = 0);

  m.def(
      "uniqueness_probe",
      [](const std::string& ref, double perturbation, double horizon) {
        Scenario sc = resolve(ref);
        if (horizon > 0) sc.horizon = horizon;
        UniquenessOptions opts;
        opts.seed = sc.seed;
        UniquenessReport rep =
            uniqueness_probe(*sc.set, sc.metric, sc.field, sc.initial_points.front(), sc.horizon,
                             sc.integrator, perturbation, opts);
        py::dict out;
        out["perturbation"] = rep.perturbation;
        out["lipschitz"] = rep.lipschitz;
        out["max_divergence"] = rep.max_divergence;
        out["normalized"] = rep.normalized;
        out["flagged"] = rep.flagged;
        return out;
      },
      py::arg("scenario"), py::arg("perturbation") = 1e-8, py::arg("horizon") = 0.0);

  m.def("verify", [](const std::string& ref) {
    py::list out;
    for (const AssertionOutcome& o : resolve(ref).verify()) {
      out.append(py::make_tuple(o.kind, o.passed, o.detail));
    }
    return out;
  });

  m.def(
      "invariance_harness",
      [](const std::string& ref, const std::string& chart, double horizon) {
        Scenario sc = resolve(ref);
        auto smooth = std::dynamic_pointer_cast<const SmoothInequalitySet>(sc.set);
        if (!smooth) {
          throw std::invalid_argument("the harness needs a smooth-inequality scenario set");
        }
        if (horizon > 0) sc.horizon = horizon;
        const HarnessReport rep =
            invariance_harness(Chart::by_name(chart, sc.dim), smooth, sc.metric, sc.field,
                               sc.initial_points.front(), sc.horizon, sc.integrator);
        py::dict out;
        out["max_divergence"] = rep.max_divergence;
        out["dt"] = rep.dt;
        out["horizon"] = rep.horizon;
        return out;
      },
      py::arg("scenario"), py::arg("chart") = "shear", py::arg("horizon") = 0.0);
}
