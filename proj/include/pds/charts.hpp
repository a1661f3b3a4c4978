#pragma once

#include "pds/dynamics.hpp"

#include <memory>
#include <string>

namespace pds {

/// A diffeomorphism of an open subset of R^n onto its image, with inverse
/// and Jacobian (finite differences when absent).
class Chart {
public:
  using MapFn = std::function<Vec(const Vec&)>;
  using JacFn = std::function<Mat(const Vec&)>;
  using DomainFn = std::function<bool(const Vec&)>;

  Chart() = default;
  Chart(MapFn forward, MapFn inverse, JacFn jacobian = nullptr, DomainFn domain = nullptr,
        std::string name = "");

  Vec forward(const Vec& x) const;
  Vec inverse(const Vec& y) const;
  Mat jacobian(const Vec& x) const;
  bool in_domain(const Vec& x) const;
  const std::string& name() const { return name_; }

  static Chart identity(int n);
  static Chart linear(Mat A, std::string name = "linear");
  /// The plane shear (x1, x2) -> (x1 + x2, x2).
  static Chart shear2d();
  /// Plane inversion y -> y/|y|^2 (the transition between the two
  /// stereographic charts of the sphere), valid away from the origin.
  static Chart inversion2d();

  /// Registry lookup for configs: "identity", "shear",
  /// "stereographic-transition".
  static Chart by_name(const std::string& name, int dim = 2);

private:
  MapFn forward_;
  MapFn inverse_;
  JacFn jacobian_;
  DomainFn domain_;
  std::string name_;
};

/// (Phi* g)(x) = D_x Phi' G(Phi(x)) D_x Phi.
MetricField pullback_metric(const Chart& c, const MetricField& g);

/// y -> D_{Phi^{-1}(y)} Phi ( f(Phi^{-1}(y)) ).
VectorField pushforward_field(const Chart& c, const VectorField& f);

/// Image of a smooth inequality set under the chart: h_up = h o Phi^{-1}.
std::shared_ptr<SmoothInequalitySet> image_set(const Chart& c,
                                               std::shared_ptr<const SmoothInequalitySet> S);

struct HarnessReport {
  double max_divergence = 0.0;
  double dt = 0.0;
  double horizon = 0.0;
};

/// Integrates (S, Phi*g, f) downstairs, maps the trajectory through Phi, and
/// compares against the upstairs integration (Phi(S), g, pushforward f).
/// Throws ChartDomainError when either trajectory leaves the chart domain.
HarnessReport invariance_harness(const Chart& c, std::shared_ptr<const SmoothInequalitySet> S,
                                 const MetricField& g_upstairs, const VectorField& f_downstairs,
                                 const Vec& x0, double horizon, const IntegratorConfig& cfg);

/// Charts with overlap consistency data.
struct Atlas {
  std::vector<Chart> charts;
  double transition_tol = 1e-8;

  /// Checks that transitions i->j->i are mutually inverse on sample points.
  void validate_overlap(const std::vector<Vec>& overlap_points) const;
};

} // namespace pds
