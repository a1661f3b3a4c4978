#include "pds/scenarios.hpp"

#include "pds/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pds {

// ---------------------------------------------------------------------------
// Sphere scenario machinery
// ---------------------------------------------------------------------------

namespace {
double chart_sign(int chart) { return chart == 0 ? -1.0 : +1.0; } // sign of p3 term
} // namespace

Vec SphereData::embed(int chart, const Vec& y) const {
  const double q = 1.0 + y.squaredNorm();
  Vec p(3);
  p << 2.0 * y[0] / q, 2.0 * y[1] / q, -chart_sign(chart) * (y.squaredNorm() - 1.0) / q;
  return p;
}

Mat SphereData::embed_jacobian(int chart, const Vec& y) const {
  const double q = 1.0 + y.squaredNorm();
  Mat J(3, 2);
  J.topRows(2) = (2.0 / q) * (Mat::Identity(2, 2) - (2.0 / q) * y * y.transpose());
  J.row(2) = -chart_sign(chart) * (4.0 / (q * q)) * y.transpose();
  return J;
}

Vec SphereData::to_chart(int chart, const Vec& p) const {
  const double denom = 1.0 - (-chart_sign(chart)) * p[2];
  Vec y(2);
  y << p[0] / denom, p[1] / denom;
  return y;
}

int SphereData::preferred_chart(const Vec& p) const { return p[2] > 0.0 ? 1 : 0; }

std::shared_ptr<SmoothInequalitySet> SphereData::chart_set(int chart) const {
  const Vec a = cap_axis;
  const double c = cap_cos;
  SphereData self = *this;
  return std::make_shared<SmoothInequalitySet>(
      2, 1,
      [self, chart, a, c](const Vec& y) -> Vec {
        Vec h(1);
        h[0] = self.embed(chart, y).dot(a) - c;
        return h;
      },
      [self, chart, a](const Vec& y) -> Mat {
        return a.transpose() * self.embed_jacobian(chart, y);
      });
}

MetricField SphereData::chart_metric(int chart) const {
  (void)chart; // the round metric is conformal in both charts
  return MetricField([](const Vec& y) -> Mat {
    const double q = 1.0 + y.squaredNorm();
    return (4.0 / (q * q)) * Mat::Identity(2, 2);
  });
}

VectorField SphereData::chart_field(int chart) const {
  SphereData self = *this;
  return VectorField(
      [self, chart](const Vec& y) -> Vec {
        const Vec p = self.embed(chart, y);
        const Eigen::Vector3d w(self.omega[0], self.omega[1], self.omega[2]);
        const Eigen::Vector3d pv(p[0], p[1], p[2]);
        const Vec v = w.cross(pv);
        const double denom = 1.0 - (-chart_sign(chart)) * p[2];
        Mat J(2, 3);
        J << 1.0 / denom, 0.0, -chart_sign(chart) * y[0] / denom, 0.0, 1.0 / denom,
            -chart_sign(chart) * y[1] / denom;
        return J * v;
      },
      "rotation");
}

SphereTrajectory sphere_integrate(const SphereData& data, const Vec& p0_ambient, double horizon,
                                  const IntegratorConfig& cfg) {
  cfg.validate();
  SphereTrajectory result;
  Trajectory& traj = result.ambient;

  int chart = data.preferred_chart(p0_ambient);
  std::shared_ptr<SmoothInequalitySet> sets[2] = {data.chart_set(0), data.chart_set(1)};
  MetricField metrics[2] = {data.chart_metric(0), data.chart_metric(1)};
  VectorField fields[2] = {data.chart_field(0), data.chart_field(1)};

  Vec y = data.to_chart(chart, p0_ambient);
  if (!sets[chart]->member(y)) y = sets[chart]->restore(y, metrics[chart], nullptr);

  traj.times.push_back(0.0);
  traj.states.push_back(data.embed(chart, y));
  std::vector<int> active = sets[chart]->active_ids(y);
  traj.initial_active = active;
  traj.termination = Termination::horizon_reached;

  double t = 0.0;
  int quiet = 0;
  while (t < horizon - 1e-15) {
    IntegratorConfig local = cfg;
    local.dt = std::min(cfg.dt, horizon - t);
    local.dt_floor = std::min(cfg.dt_floor, local.dt);
    StepResult sr;
    try {
      sr = step(*sets[chart], metrics[chart], fields[chart], y, local);
    } catch (const RestorationError&) {
      traj.termination = Termination::restoration_failure;
      break;
    }
    if (sr.hit_floor) {
      traj.termination = Termination::step_floor;
      break;
    }
    const Vec v_ambient = data.embed_jacobian(chart, y) * sr.v;
    const double speed = metrics[chart].norm(y, sr.v);
    y = sr.x_next;
    t += sr.dt_used;
    traj.times.push_back(t);
    traj.states.push_back(data.embed(chart, y));
    traj.velocities.push_back(v_ambient);

    std::vector<int> now = sets[chart]->active_ids(y);
    if (now != active) {
      traj.events.push_back({t, active, now});
      active = std::move(now);
    }
    if (speed <= cfg.equil_tol) {
      if (++quiet >= 3) {
        traj.termination = Termination::equilibrium;
        break;
      }
    } else {
      quiet = 0;
    }

    if (y.norm() > data.switch_norm) {
      y /= y.squaredNorm();
      chart = 1 - chart;
      result.chart_switches.emplace_back(t, chart);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

Trajectory Scenario::simulate(const Vec& x0) const {
  if (sphere) {
    const Vec p0 = x0.size() == 3 ? x0 : sphere->embed(0, x0);
    return sphere_integrate(*sphere, p0, horizon, integrator).ambient;
  }
  return integrate(*set, metric, field, x0, horizon, integrator);
}

namespace {

Vec json_to_vec(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Mat json_to_mat(const json& a) {
  const size_t rows = a.size();
  const size_t cols = rows ? a[0].size() : 0;
  Mat m(rows, cols);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) m(r, c) = a[r][c].get<double>();
  return m;
}

json mat_to_json(const Mat& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

double terminal_kkt_residual(const Scenario& sc, const Trajectory& traj) {
  const Vec xT = traj.final_state();
  const Vec w = sc.field(xT); // -grad_g psi for flow scenarios
  const Mat G = sc.metric.is_euclidean() ? Mat::Identity(xT.size(), xT.size())
                                         : sc.metric.matrix(xT);
  const std::vector<Vec> gens = sc.set->normal_generators(xT, sc.metric);
  Vec proj = Vec::Zero(xT.size());
  if (!gens.empty()) proj = nnls_project(gens, G, w).point;
  const Vec r = w - proj;
  return std::sqrt(std::max(0.0, r.dot(G * r)));
}

} // namespace

std::vector<AssertionOutcome> Scenario::verify() const {
  std::vector<AssertionOutcome> outcomes;
  std::optional<Trajectory> traj; // simulated lazily, first initial point
  auto get_traj = [&]() -> const Trajectory& {
    if (!traj) traj = simulate(initial_points.front());
    return *traj;
  };

  for (const ExpectedAssertion& a : expected) {
    AssertionOutcome out;
    out.kind = a.kind;
    out.passed = false;
    std::ostringstream detail;
    try {
      if (a.kind == "final_state") {
        const Vec want = json_to_vec(a.params.at("point"));
        const double tol = a.params.at("tol").get<double>();
        const double err = (get_traj().final_state() - want).norm();
        out.passed = err <= tol;
        detail << "final-state error " << err << " (tol " << tol << ")";
      } else if (a.kind == "stays_at") {
        const Vec want = json_to_vec(a.params.at("point"));
        const double tol = a.params.at("tol").get<double>();
        double worst = 0.0;
        for (const Vec& s : get_traj().states) worst = std::max(worst, (s - want).norm());
        out.passed = worst <= tol;
        detail << "max drift " << worst << " (tol " << tol << ")";
      } else if (a.kind == "event_near") {
        const double t = a.params.at("time").get<double>();
        const double tol = a.params.at("tol").get<double>();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& ev : get_traj().events) best = std::min(best, std::abs(ev.time - t));
        out.passed = best <= tol;
        detail << "nearest event at distance " << best << " from t=" << t;
      } else if (a.kind == "equilibrium") {
        const std::string want = a.params.at("kind").get<std::string>();
        const double tol = a.params.value("tol", 1e-3);
        const double radius = a.params.value("radius", 1e-2);
        const EquilibriumKind kind = detect_equilibrium(
            *set, metric, field, initial_points.front(), tol, radius, 256, seed);
        out.passed = want == to_string(kind);
        detail << "detected " << to_string(kind) << ", expected " << want;
      } else if (a.kind == "projection_branches") {
        const Vec at = json_to_vec(a.params.at("point"));
        const double tol = a.params.value("tol", 1e-9);
        ProjectionResult r = project_field(*set, metric, field, at);
        const json& want = a.params.at("vectors");
        bool ok = r.projected.size() == want.size();
        for (const auto& wj : want) {
          const Vec w = json_to_vec(wj);
          bool found = false;
          for (const Vec& v : r.projected) {
            if ((v - w).norm() <= tol) found = true;
          }
          ok = ok && found;
        }
        out.passed = ok;
        detail << r.projected.size() << " branch minimizers";
      } else if (a.kind == "terminal_kkt") {
        const double tol = a.params.at("tol").get<double>();
        const double res = terminal_kkt_residual(*this, get_traj());
        out.passed = res <= tol;
        detail << "KKT residual " << res << " (tol " << tol << ")";
      } else if (a.kind == "descent_monotone") {
        const double tol = a.params.value("tol", 1e-8);
        if (!potential) throw std::runtime_error("descent assertion needs a potential");
        LyapunovLog log = lasalle_monitor(*set, metric, *potential, get_traj(), tol);
        out.passed = log.monotone;
        detail << "max Lie sample " << log.max_lie;
      } else if (a.kind == "uniqueness_flag") {
        const bool want = a.params.at("expected").get<bool>();
        const double pert = a.params.value("perturbation", 1e-8);
        const double hor = a.params.value("horizon", 2.0);
        UniquenessOptions opts;
        opts.seed = seed;
        UniquenessReport rep = uniqueness_probe(*set, metric, field, initial_points.front(), hor,
                                                integrator, pert, opts);
        out.passed = rep.flagged == want;
        detail << "flagged=" << (rep.flagged ? "true" : "false") << " normalized divergence "
               << rep.normalized;
      } else if (a.kind == "norm_preserved") {
        const double tol = a.params.at("tol").get<double>();
        double worst = 0.0;
        for (const Vec& s : get_traj().states) worst = std::max(worst, std::abs(s.norm() - 1.0));
        out.passed = worst <= tol;
        detail << "max ambient norm drift " << worst;
      } else if (a.kind == "returns_to_start") {
        const double tol = a.params.at("tol").get<double>();
        const Trajectory& tr = get_traj();
        const double err = (tr.final_state() - tr.states.front()).norm();
        out.passed = err <= tol;
        detail << "return distance " << err << " (tol " << tol << ")";
      } else {
        detail << "unknown assertion kind";
      }
    } catch (const std::exception& e) {
      out.passed = false;
      detail << "exception: " << e.what();
    }
    out.detail = detail.str();
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<const FeasibleSet> set_from_json(const json& j, double* x_alpha_out) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "polyhedron") {
    return SmoothInequalitySet::polyhedron(json_to_mat(j.at("A")), json_to_vec(j.at("b")));
  }
  if (type == "box") {
    return SmoothInequalitySet::box(json_to_vec(j.at("lo")), json_to_vec(j.at("hi")));
  }
  if (type == "ball") {
    return SmoothInequalitySet::ball(json_to_vec(j.at("center")), j.at("radius").get<double>());
  }
  if (type == "whole") {
    return SmoothInequalitySet::whole_space(j.at("dim").get<int>());
  }
  if (type == "builtin") {
    const std::string name = j.at("name").get<std::string>();
    if (name == "marble-run") return make_marble_run();
    if (name == "x-alpha") {
      const double alpha = j.at("alpha").get<double>();
      if (x_alpha_out) *x_alpha_out = alpha;
      return make_x_alpha(alpha);
    }
    throw std::invalid_argument("unknown builtin set: " + name);
  }
  throw std::invalid_argument("unknown set type: " + type);
}

ScalarField potential_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "quadratic") {
    return ScalarField::quadratic(json_to_mat(j.at("Q")), json_to_vec(j.at("center")));
  }
  throw std::invalid_argument("unknown potential type: " + type);
}

MetricField metric_from_json(const json& j, const std::optional<ScalarField>& psi) {
  // Compact string forms: "euclidean", "constant:<matrix>", "hessian[:name]".
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "euclidean") return MetricField::euclidean();
    if (s.rfind("constant:", 0) == 0) {
      return MetricField::constant(json_to_mat(json::parse(s.substr(9))));
    }
    if (s.rfind("hessian", 0) == 0) {
      if (!psi) throw std::invalid_argument("hessian metric requires a potential");
      return hessian_metric(*psi);
    }
    throw std::invalid_argument("unknown metric name: " + s);
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "euclidean") return MetricField::euclidean();
  if (type == "constant") return MetricField::constant(json_to_mat(j.at("matrix")));
  if (type == "hessian") {
    if (!psi) throw std::invalid_argument("hessian metric requires a potential");
    return hessian_metric(*psi);
  }
  throw std::invalid_argument("unknown metric type: " + type);
}

VectorField slide_field() {
  return VectorField(
      [](const Vec& x) -> Vec {
        Vec f(2);
        f << 1.0, -x[1] - 0.6;
        return f;
      },
      "slide");
}

VectorField field_from_json(const json& j, const std::optional<ScalarField>& psi,
                            const MetricField& metric) {
  // Compact string forms: "gradient[:name]", "newton[:name]",
  // "constant:<vector>", "raw:<builtin-name>".
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.rfind("gradient", 0) == 0 || s.rfind("newton", 0) == 0) {
      return field_from_json(json{{"type", s.substr(0, s.find(':'))}}, psi, metric);
    }
    if (s.rfind("constant:", 0) == 0) {
      return VectorField::constant(json_to_vec(json::parse(s.substr(9))));
    }
    if (s.rfind("raw:", 0) == 0) {
      return field_from_json(json{{"type", "builtin"}, {"name", s.substr(4)}}, psi, metric);
    }
    throw std::invalid_argument("unknown field name: " + s);
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return VectorField::constant(json_to_vec(j.at("value")));
  if (type == "linear") return VectorField::linear(json_to_mat(j.at("A")));
  if (type == "zero") return VectorField::zero(j.at("dim").get<int>());
  if (type == "gradient" || type == "newton") {
    if (!psi) throw std::invalid_argument("flow fields require a potential");
    VectorField grad = grad_field(*psi, metric);
    return VectorField([grad](const Vec& x) -> Vec { return -grad(x); }, "-grad");
  }
  if (type == "builtin") {
    const std::string name = j.at("name").get<std::string>();
    if (name == "slide") return slide_field();
    throw std::invalid_argument("unknown builtin field: " + name);
  }
  throw std::invalid_argument("unknown field type: " + type);
}

IntegratorConfig integrator_from_json(const json& j) {
  IntegratorConfig cfg;
  cfg.dt = j.value("dt", cfg.dt);
  const std::string scheme = j.value("scheme", "tangent_euler");
  cfg.scheme = scheme == "projected_euler" ? Scheme::projected_euler : Scheme::tangent_euler;
  cfg.equil_tol = j.value("equil_tol", cfg.equil_tol);
  cfg.max_restore = j.value("max_restore", cfg.max_restore);
  cfg.dt_floor = j.value("dt_floor", cfg.dt_floor);
  cfg.kappa_warn = j.value("kappa_warn", cfg.kappa_warn);
  return cfg;
}

json integrator_to_json(const IntegratorConfig& cfg) {
  return json{{"dt", cfg.dt},
              {"scheme", to_string(cfg.scheme)},
              {"equil_tol", cfg.equil_tol},
              {"max_restore", cfg.max_restore},
              {"dt_floor", cfg.dt_floor},
              {"kappa_warn", cfg.kappa_warn}};
}

} // namespace

Scenario scenario_from_json(const json& config) {
  Scenario sc;
  sc.name = config.at("name").get<std::string>();
  sc.seed = config.value("seed", 0);
  if (config.contains("potential")) sc.potential = potential_from_json(config.at("potential"));

  if (config.contains("sphere")) {
    const json& sj = config.at("sphere");
    SphereData data;
    data.cap_axis = json_to_vec(sj.at("cap_axis")).normalized();
    data.cap_cos = sj.at("cap_cos").get<double>();
    data.omega = json_to_vec(sj.at("omega"));
    data.switch_norm = sj.value("switch_norm", 2.0);
    sc.sphere = data;
    sc.dim = 2;
    sc.set = data.chart_set(0);
    sc.metric = data.chart_metric(0);
    sc.field = data.chart_field(0);
  } else {
    double alpha = 0.0;
    sc.set = set_from_json(config.at("set"), &alpha);
    sc.dim = sc.set->dim();
    sc.metric = metric_from_json(config.at("metric"), sc.potential);
    sc.field = field_from_json(config.at("field"), sc.potential, sc.metric);
  }

  for (const json& p : config.at("initial_points")) sc.initial_points.push_back(json_to_vec(p));
  sc.horizon = config.at("horizon").get<double>();
  if (config.contains("integrator")) sc.integrator = integrator_from_json(config.at("integrator"));
  if (config.contains("expected")) {
    for (const json& e : config.at("expected")) {
      sc.expected.push_back({e.at("kind").get<std::string>(), e.value("params", json::object())});
    }
  }

  // Initial points must be feasible, restoring when needed.
  for (Vec& x0 : sc.initial_points) {
    if (sc.sphere) {
      Vec p0 = x0.size() == 3 ? Vec(x0.normalized()) : sc.sphere->embed(0, x0);
      const int chart = sc.sphere->preferred_chart(p0);
      auto chart_set = sc.sphere->chart_set(chart);
      Vec y = sc.sphere->to_chart(chart, p0);
      if (!chart_set->member(y)) {
        y = chart_set->restore(y, sc.sphere->chart_metric(chart), nullptr);
      }
      x0 = sc.sphere->embed(chart, y);
      continue;
    }
    if (static_cast<int>(x0.size()) != sc.dim) {
      throw std::invalid_argument("initial point dimension mismatch in scenario " + sc.name);
    }
    if (!sc.set->member(x0)) x0 = sc.set->restore(x0, sc.metric, nullptr);
  }
  sc.config = config;
  return sc;
}

json scenario_to_json(const Scenario& sc) {
  json j = sc.config;
  // Normalize the parts that may have been adjusted after loading.
  j["name"] = sc.name;
  j["seed"] = sc.seed;
  j["horizon"] = sc.horizon;
  j["integrator"] = integrator_to_json(sc.integrator);
  json pts = json::array();
  for (const Vec& p : sc.initial_points) pts.push_back(vec_to_json(p));
  j["initial_points"] = pts;
  return j;
}

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

namespace {

json halfplane_slide_json() {
  return json{
      {"name", "halfplane-slide"},
      {"seed", 0},
      {"set", {{"type", "polyhedron"}, {"A", json::array({json::array({0.0, -1.0})})},
               {"b", json::array({0.0})}}},
      {"metric", {{"type", "euclidean"}}},
      {"field", {{"type", "builtin"}, {"name", "slide"}}},
      {"initial_points", json::array({json::array({0.0, 1.0})})},
      {"horizon", 2.0},
      {"integrator", {{"dt", 1e-3}}},
      {"expected",
       json::array(
           {json{{"kind", "final_state"},
                 {"params", {{"point", json::array({2.0, 0.0})}, {"tol", 5e-3}}}},
            json{{"kind", "event_near"},
                 {"params", {{"time", 0.980829253011726}, {"tol", 0.02}}}}})}};
}

json marble_run_json() {
  const Vec p0 = marble_run_top(0);
  return json{
      {"name", "marble-run"},
      {"seed", 0},
      {"set", {{"type", "builtin"}, {"name", "marble-run"}}},
      {"metric", {{"type", "euclidean"}}},
      {"field", {{"type", "constant"}, {"value", json::array({0.0, 1.0})}}},
      {"initial_points", json::array({vec_to_json(p0)})},
      {"horizon", 0.5},
      {"integrator", {{"dt", 1e-3}}},
      {"expected",
       json::array(
           {json{{"kind", "stays_at"}, {"params", {{"point", vec_to_json(p0)}, {"tol", 1e-9}}}},
            json{{"kind", "projection_branches"},
                 {"params",
                  {{"point", json::array({0.0, 0.0})},
                   {"vectors", json::array({json::array({0.5, 0.5}), json::array({-0.5, 0.5})})},
                   {"tol", 1e-9}}}}})}};
}

json x_alpha_json(double alpha) {
  std::ostringstream name;
  name << "x-alpha:" << alpha;
  const bool prox_regular = alpha <= 0.5;
  json expected = json::array();
  // The strong/weak dichotomy is sharp at alpha = 1/2; the fixed-radius hull
  // classifier cannot decide the borderline itself, so the equilibrium
  // assertion is only attached away from it.
  if (std::abs(alpha - 0.5) > 0.05) {
    expected.push_back(json{
        {"kind", "equilibrium"},
        {"params",
         {{"kind", prox_regular ? "strong-candidate" : "weak-candidate"}, {"tol", 1e-3},
          {"radius", 1e-2}}}});
  }
  expected.push_back(json{{"kind", "uniqueness_flag"},
                          {"params",
                           {{"expected", !prox_regular}, {"perturbation", 1e-8},
                            {"horizon", 2.0}}}});
  return json{{"name", name.str()},
              {"seed", 0},
              {"set", {{"type", "builtin"}, {"name", "x-alpha"}, {"alpha", alpha}}},
              {"metric", {{"type", "euclidean"}}},
              {"field", {{"type", "constant"}, {"value", json::array({1.0, 0.0})}}},
              {"initial_points", json::array({json::array({0.0, 0.0})})},
              {"horizon", 2.0},
              {"integrator", {{"dt", 1e-3}}},
              {"expected", expected}};
}

json polyhedron_gradient_json() {
  return json{
      {"name", "polyhedron-gradient"},
      {"seed", 0},
      {"set",
       {{"type", "polyhedron"},
        {"A", json::array({json::array({-1.0, 0.0}), json::array({0.0, -1.0}),
                           json::array({1.0, 2.0}), json::array({2.0, 1.0})})},
        {"b", json::array({0.0, 0.0, 2.0, 2.5})}}},
      {"metric", {{"type", "euclidean"}}},
      {"potential",
       {{"type", "quadratic"},
        {"Q", json::array({json::array({1.0, 0.0}), json::array({0.0, 1.0})})},
        {"center", json::array({0.8, 1.6})}}},
      {"field", {{"type", "gradient"}}},
      {"initial_points", json::array({json::array({0.1, 0.1})})},
      {"horizon", 15.0},
      {"integrator", {{"dt", 1e-3}, {"equil_tol", 1e-7}}},
      {"expected",
       json::array(
           {json{{"kind", "final_state"},
                 {"params", {{"point", json::array({0.4, 0.8})}, {"tol", 1e-4}}}},
            json{{"kind", "terminal_kkt"}, {"params", {{"tol", 1e-5}}}},
            json{{"kind", "descent_monotone"}, {"params", {{"tol", 1e-8}}}}})}};
}

json box_newton_json() {
  return json{
      {"name", "box-newton"},
      {"seed", 0},
      {"set",
       {{"type", "box"}, {"lo", json::array({0.0, 0.0})}, {"hi", json::array({1.0, 1.0})}}},
      {"metric", {{"type", "hessian"}}},
      {"potential",
       {{"type", "quadratic"},
        {"Q", json::array({json::array({2.0, 0.5}), json::array({0.5, 1.0})})},
        {"center", json::array({1.6, 0.4})}}},
      {"field", {{"type", "newton"}}},
      {"initial_points", json::array({json::array({0.2, 0.8})})},
      {"horizon", 15.0},
      {"integrator", {{"dt", 1e-3}, {"equil_tol", 1e-7}}},
      {"expected",
       json::array(
           {json{{"kind", "final_state"},
                 {"params", {{"point", json::array({1.0, 0.7})}, {"tol", 1e-4}}}},
            json{{"kind", "terminal_kkt"}, {"params", {{"tol", 1e-5}}}},
            json{{"kind", "descent_monotone"}, {"params", {{"tol", 1e-8}}}}})}};
}

json sphere_cap_json() {
  // The first start sits on the grazing orbit (tangency of the rotation
  // circles with the excluded-cap rim, in the plane of the two axes) and is
  // periodic; the second start cuts the cap and slides along the rim before
  // settling onto the same orbit.
  return json{
      {"name", "sphere-cap"},
      {"seed", 0},
      {"sphere",
       {{"cap_axis", json::array({0.573576436351046, 0.0, 0.819152044288992})},
        {"cap_cos", 0.866025403784439},
        {"omega", json::array({1.0, 0.0, 0.0})},
        {"switch_norm", 2.0}}},
      {"initial_points",
       json::array({json::array({0.087903645263571, 0.0, 0.996128505509947}),
                    json::array({0.3, 0.95393920141694566, 0.0})})},
      {"horizon", 6.283185307179586},
      {"integrator", {{"dt", 1e-3}}},
      {"expected",
       json::array({json{{"kind", "norm_preserved"}, {"params", {{"tol", 1e-6}}}},
                    json{{"kind", "returns_to_start"}, {"params", {{"tol", 1e-2}}}}})}};
}

} // namespace

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  out.push_back(scenario_from_json(halfplane_slide_json()));
  out.push_back(scenario_from_json(marble_run_json()));
  out.push_back(scenario_from_json(x_alpha_json(0.3)));
  out.push_back(scenario_from_json(x_alpha_json(0.5)));
  out.push_back(scenario_from_json(x_alpha_json(0.6)));
  out.push_back(scenario_from_json(polyhedron_gradient_json()));
  out.push_back(scenario_from_json(box_newton_json()));
  out.push_back(scenario_from_json(sphere_cap_json()));
  return out;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  if (name.rfind("x-alpha:", 0) == 0) {
    const double alpha = std::stod(name.substr(8));
    Scenario sc = scenario_from_json(x_alpha_json(alpha));
    sc.name = name;
    return sc;
  }
  for (Scenario& sc : builtin_scenarios()) {
    if (sc.name == name) return std::move(sc);
  }
  return std::nullopt;
}

} // namespace pds
