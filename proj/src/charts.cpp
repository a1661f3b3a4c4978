#include "pds/charts.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>

namespace pds {

Chart::Chart(MapFn forward, MapFn inverse, JacFn jacobian, DomainFn domain, std::string name)
    : forward_(std::move(forward)), inverse_(std::move(inverse)), jacobian_(std::move(jacobian)),
      domain_(std::move(domain)), name_(std::move(name)) {}

Vec Chart::forward(const Vec& x) const {
  if (!in_domain(x)) {
    throw ChartDomainError("point outside chart domain (" + name_ + ")", 0.0);
  }
  return forward_(x);
}

Vec Chart::inverse(const Vec& y) const { return inverse_(y); }

Mat Chart::jacobian(const Vec& x) const {
  if (jacobian_) return jacobian_(x);
  const int n = static_cast<int>(x.size());
  Mat J(n, n);
  Vec xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    const double h = fd_step(x[j]);
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    J.col(j) = (forward_(xp) - forward_(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

bool Chart::in_domain(const Vec& x) const { return domain_ ? domain_(x) : true; }

Chart Chart::identity(int n) {
  (void)n;
  return Chart([](const Vec& x) { return x; }, [](const Vec& y) { return y; },
               [](const Vec& x) -> Mat { return Mat::Identity(x.size(), x.size()); }, nullptr,
               "identity");
}

Chart Chart::linear(Mat A, std::string name) {
  Mat Ainv = A.inverse();
  return Chart([A](const Vec& x) -> Vec { return A * x; },
               [Ainv](const Vec& y) -> Vec { return Ainv * y; },
               [A](const Vec&) -> Mat { return A; }, nullptr, std::move(name));
}

Chart Chart::shear2d() {
  Mat A(2, 2);
  A << 1, 1, 0, 1;
  return linear(A, "shear");
}

Chart Chart::inversion2d() {
  auto invert = [](const Vec& y) -> Vec { return y / y.squaredNorm(); };
  return Chart(invert, invert,
               [](const Vec& y) -> Mat {
                 const double n2 = y.squaredNorm();
                 return (Mat::Identity(2, 2) - 2.0 * y * y.transpose() / n2) / n2;
               },
               [](const Vec& y) { return y.norm() > 1e-3; }, "stereographic-transition");
}

Chart Chart::by_name(const std::string& name, int dim) {
  if (name == "identity") return identity(dim);
  if (name == "shear") return shear2d();
  if (name == "stereographic-transition") return inversion2d();
  throw std::invalid_argument("unknown chart: " + name);
}

MetricField pullback_metric(const Chart& c, const MetricField& g) {
  return MetricField([c, g](const Vec& x) -> Mat {
    const Mat J = c.jacobian(x);
    if (g.is_euclidean()) return J.transpose() * J;
    return J.transpose() * g.matrix(c.forward(x)) * J;
  });
}

VectorField pushforward_field(const Chart& c, const VectorField& f) {
  return VectorField(
      [c, f](const Vec& y) -> Vec {
        const Vec x = c.inverse(y);
        if (!c.in_domain(x)) {
          throw ChartDomainError("pushforward queried outside chart domain", 0.0);
        }
        return c.jacobian(x) * f(x);
      },
      "pushforward");
}

std::shared_ptr<SmoothInequalitySet> image_set(const Chart& c,
                                               std::shared_ptr<const SmoothInequalitySet> S) {
  const int n = S->dim();
  const int m = S->num_constraints();
  auto h = [c, S](const Vec& y) -> Vec { return S->h(c.inverse(y)); };
  auto jac = [c, S](const Vec& y) -> Mat {
    const Vec x = c.inverse(y);
    // d/dy h(Phi^{-1}(y)) = J_h(x) J_Phi(x)^{-1}
    return S->jacobian(x) * c.jacobian(x).inverse();
  };
  return std::make_shared<SmoothInequalitySet>(n, m, h, jac, S->options());
}

HarnessReport invariance_harness(const Chart& c, std::shared_ptr<const SmoothInequalitySet> S,
                                 const MetricField& g_upstairs, const VectorField& f_downstairs,
                                 const Vec& x0, double horizon, const IntegratorConfig& cfg) {
  const MetricField g_down = pullback_metric(c, g_upstairs);
  const Trajectory down = integrate(*S, g_down, f_downstairs, x0, horizon, cfg);
  for (size_t k = 0; k < down.states.size(); ++k) {
    if (!c.in_domain(down.states[k])) {
      throw ChartDomainError("downstairs trajectory left the chart domain", down.times[k]);
    }
  }

  const auto S_up = image_set(c, S);
  const VectorField f_up = pushforward_field(c, f_downstairs);
  const Trajectory up = integrate(*S_up, g_upstairs, f_up, c.forward(x0), horizon, cfg);

  HarnessReport report;
  report.dt = cfg.dt;
  report.horizon = horizon;
  const double t_end = std::min(down.final_time(), up.final_time());
  const int grid = 512;
  for (int k = 0; k <= grid; ++k) {
    const double t = t_end * k / grid;
    const Vec mapped = c.forward(down.at(t));
    report.max_divergence = std::max(report.max_divergence, (mapped - up.at(t)).norm());
  }
  return report;
}

void Atlas::validate_overlap(const std::vector<Vec>& overlap_points) const {
  for (size_t i = 0; i < charts.size(); ++i) {
    for (size_t j = 0; j < charts.size(); ++j) {
      if (i == j) continue;
      for (const Vec& p : overlap_points) {
        if (!charts[i].in_domain(p)) continue;
        const Vec q = charts[i].forward(p);
        if (!charts[j].in_domain(q)) continue;
        const Vec back = charts[j].forward(q);
        const Vec roundtrip = charts[j].inverse(back);
        if ((roundtrip - q).norm() > transition_tol * (1.0 + q.norm())) {
          std::ostringstream oss;
          oss << "atlas transition " << charts[i].name() << " -> " << charts[j].name()
              << " is not invertible on an overlap sample";
          throw std::logic_error(oss.str());
        }
      }
    }
  }
}

} // namespace pds
