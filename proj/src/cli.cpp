#include "pds/cli.hpp"

#include "pds/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace pds {

namespace {

Scenario load_scenario(const std::string& ref) {
  if (auto builtin = find_builtin(ref)) {
    Scenario sc = std::move(*builtin);
    if (const char* env = std::getenv("PDS_SEED")) sc.seed = std::strtoull(env, nullptr, 10);
    return sc;
  }
  std::ifstream in(ref);
  if (!in) throw CLI::ValidationError("--scenario", "no builtin or readable file named " + ref);
  json config = json::parse(in);
  Scenario sc = scenario_from_json(config);
  if (const char* env = std::getenv("PDS_SEED")) sc.seed = std::strtoull(env, nullptr, 10);
  return sc;
}

Vec parse_point(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  Vec v(values.size());
  for (size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  return values;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string output_name(const std::string& base, size_t index, size_t total) {
  if (total <= 1) return base;
  const size_t dot = base.find_last_of('.');
  if (dot == std::string::npos) return base + "_" + std::to_string(index);
  return base.substr(0, dot) + "_" + std::to_string(index) + base.substr(dot);
}

int do_simulate(const Scenario& sc, const std::string& out_path) {
  std::vector<std::future<std::string>> jobs;
  for (const Vec& x0 : sc.initial_points) {
    jobs.push_back(std::async(std::launch::async, [&sc, x0]() {
      std::string extra;
      Trajectory traj;
      if (sc.sphere) {
        SphereTrajectory st = sphere_integrate(*sc.sphere, x0, sc.horizon, sc.integrator);
        traj = std::move(st.ambient);
        std::ostringstream os;
        for (const auto& [time, chart] : st.chart_switches) {
          os << "# chart_switch t=" << time << " chart=" << (chart == 0 ? "north" : "south")
             << "\n";
        }
        extra = os.str();
      } else {
        traj = integrate(*sc.set, sc.metric, sc.field, x0, sc.horizon, sc.integrator);
      }
      if (traj.kappa_warning) {
        std::cerr << "warning: metric condition number exceeded " << sc.integrator.kappa_warn
                  << " along the trajectory\n";
      }
      return trajectory_to_csv(traj, sc.seed) + extra;
    }));
  }
  for (size_t i = 0; i < jobs.size(); ++i) {
    const std::string csv = jobs[i].get();
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      const std::string path = output_name(out_path, i, jobs.size());
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path);
      out << csv;
    }
  }
  return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"projected dynamical systems simulator"};
  app.require_subcommand(1);

  // scenario list
  auto* scenario_cmd = app.add_subcommand("scenario", "scenario utilities");
  scenario_cmd->require_subcommand(1);
  auto* list_cmd = scenario_cmd->add_subcommand("list", "list built-in scenarios");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "integrate a scenario and emit CSV");
  std::string sim_scenario, sim_out, sim_scheme;
  double sim_dt = 0.0, sim_horizon = 0.0;
  simulate_cmd->add_option("--scenario", sim_scenario, "builtin name or config path")->required();
  simulate_cmd->add_option("--dt", sim_dt, "override step size");
  simulate_cmd->add_option("--horizon", sim_horizon, "override horizon");
  simulate_cmd->add_option("--scheme", sim_scheme, "tangent_euler | projected_euler");
  simulate_cmd->add_option("--out", sim_out, "output CSV path (stdout when absent)");

  // project
  auto* project_cmd = app.add_subcommand("project", "projected vector field at a point");
  std::string proj_scenario, proj_point;
  bool proj_field_at = false;
  project_cmd->add_option("--scenario", proj_scenario)->required();
  project_cmd->add_option("--point", proj_point, "comma-separated coordinates")->required();
  project_cmd->add_flag("--field-at", proj_field_at, "include the raw field value");

  // analyze prox|lipschitz|equivalence
  auto* analyze_cmd = app.add_subcommand("analyze", "regularity estimators (JSON out)");
  analyze_cmd->require_subcommand(1);
  std::string ana_scenario, ana_point, ana_radii;
  double ana_radius = 0.1;
  int ana_samples = 2000;
  auto add_common = [&](CLI::App* sub, bool radii) {
    sub->add_option("--scenario", ana_scenario)->required();
    sub->add_option("--point", ana_point)->required();
    if (radii) {
      sub->add_option("--radii", ana_radii, "comma-separated radii")->required();
    } else {
      sub->add_option("--radius", ana_radius);
    }
    sub->add_option("--samples", ana_samples);
  };
  auto* prox_cmd = analyze_cmd->add_subcommand("prox", "prox-regularity estimate");
  add_common(prox_cmd, true);
  auto* lip_cmd = analyze_cmd->add_subcommand("lipschitz", "one-sided Lipschitz estimate");
  add_common(lip_cmd, false);
  auto* equiv_cmd = analyze_cmd->add_subcommand("equivalence", "Krasovskii equivalence residual");
  add_common(equiv_cmd, false);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run a scenario's expected assertions");
  std::string ver_scenario;
  verify_cmd->add_option("--scenario", ver_scenario)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) { // --help
      return app.exit(e);
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*list_cmd) {
      for (const Scenario& sc : builtin_scenarios()) std::cout << sc.name << "\n";
      return 0;
    }
    if (*simulate_cmd) {
      Scenario sc = load_scenario(sim_scenario);
      if (sim_dt > 0.0) {
        sc.integrator.dt = sim_dt;
        sc.integrator.dt_floor = std::min(sc.integrator.dt_floor, sim_dt * 1e-3);
      }
      if (sim_horizon > 0.0) sc.horizon = sim_horizon;
      if (!sim_scheme.empty()) {
        if (sim_scheme == "tangent_euler") {
          sc.integrator.scheme = Scheme::tangent_euler;
        } else if (sim_scheme == "projected_euler") {
          sc.integrator.scheme = Scheme::projected_euler;
        } else {
          std::cerr << "usage error: unknown scheme " << sim_scheme << "\n";
          return 2;
        }
      }
      return do_simulate(sc, sim_out);
    }
    if (*project_cmd) {
      Scenario sc = load_scenario(proj_scenario);
      const Vec x = parse_point(proj_point);
      ProjectionResult r = project_field(*sc.set, sc.metric, sc.field, x);
      json out;
      out["v"] = vec_json(r.primary());
      out["eta"] = vec_json(r.normal_part);
      json alpha = json::object();
      for (const auto& [idx, val] : r.active_multipliers) alpha[std::to_string(idx)] = val;
      out["alpha"] = alpha;
      out["branches"] = r.projected.size();
      if (r.multi_valued()) {
        json all = json::array();
        for (const Vec& v : r.projected) all.push_back(vec_json(v));
        out["branch_minimizers"] = all;
      }
      if (proj_field_at) out["f"] = vec_json(sc.field(x));
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*prox_cmd) {
      Scenario sc = load_scenario(ana_scenario);
      const Vec x = parse_point(ana_point);
      ProxReport rep = prox_estimate(*sc.set, sc.metric, x, parse_list(ana_radii), ana_samples,
                                     sc.seed);
      json out;
      out["point"] = vec_json(rep.point);
      out["radii"] = rep.radii;
      out["l_estimates"] = rep.L_estimates;
      out["verdict"] = to_string(rep.verdict);
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*lip_cmd) {
      Scenario sc = load_scenario(ana_scenario);
      const Vec x = parse_point(ana_point);
      const double est =
          one_sided_lipschitz(*sc.set, sc.metric, sc.field, x, ana_radius, ana_samples, sc.seed);
      json out{{"point", vec_json(x)}, {"radius", ana_radius}, {"samples", ana_samples},
               {"estimate", est}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*equiv_cmd) {
      Scenario sc = load_scenario(ana_scenario);
      const Vec x = parse_point(ana_point);
      const double res =
          equivalence_residual(*sc.set, sc.metric, sc.field, x, ana_radius, ana_samples, sc.seed);
      json out{{"point", vec_json(x)}, {"radius", ana_radius}, {"samples", ana_samples},
               {"residual", res}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*verify_cmd) {
      Scenario sc = load_scenario(ver_scenario);
      bool all_ok = true;
      for (const AssertionOutcome& out : sc.verify()) {
        std::cout << (out.passed ? "[pass] " : "[FAIL] ") << out.kind << ": " << out.detail
                  << "\n";
        all_ok = all_ok && out.passed;
      }
      if (!all_ok) {
        std::cerr << "verify failed: " << ver_scenario << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasiblePointError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const RestorationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DefinitenessError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateRankError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const SamplerError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

} // namespace pds
