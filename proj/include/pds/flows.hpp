#pragma once

#include "pds/dynamics.hpp"

#include <memory>
#include <string>

namespace pds {

/// G(x) = hessian of psi; DefinitenessError where psi is not locally
/// strongly convex.
MetricField hessian_metric(const ScalarField& psi);

/// grad_g psi (x) = G(x)^{-1} grad psi(x)^T.
VectorField grad_field(const ScalarField& psi, const MetricField& g);

/// A (set, metric, field) triple ready for integrate(). `kind` records which
/// construction produced it for reporting.
struct Flow {
  std::shared_ptr<const FeasibleSet> set;
  MetricField metric;
  VectorField field;
  std::string kind;

  Trajectory run(const Vec& x0, double horizon, const IntegratorConfig& cfg) const {
    return integrate(*set, metric, field, x0, horizon, cfg);
  }
};

/// f = -grad_g psi, projected under the same metric g.
Flow projected_gradient_flow(std::shared_ptr<const FeasibleSet> S, const MetricField& g,
                             const ScalarField& psi);

/// Gradient flow in the Hessian metric of psi (continuous-time Newton).
Flow newton_flow(std::shared_ptr<const FeasibleSet> S, const ScalarField& psi);

/// Steps with the minimum-g-norm element of f(x) - N_x^g X and restores.
/// Cross-validation path: must match the tangent_euler step.
Vec normal_cone_step(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                     const Vec& x, double dt);

} // namespace pds
