#include "pds/flows.hpp"

#include "pds/nnls.hpp"

#include <Eigen/Cholesky>

namespace pds {

MetricField hessian_metric(const ScalarField& psi) {
  return MetricField([psi](const Vec& x) { return psi.hessian(x); });
}

VectorField grad_field(const ScalarField& psi, const MetricField& g) {
  if (g.is_euclidean()) {
    return VectorField([psi](const Vec& x) { return psi.gradient(x); }, "grad");
  }
  return VectorField(
      [psi, g](const Vec& x) -> Vec {
        return g.matrix(x).llt().solve(psi.gradient(x));
      },
      "grad");
}

Flow projected_gradient_flow(std::shared_ptr<const FeasibleSet> S, const MetricField& g,
                             const ScalarField& psi) {
  // One metric for both the gradient and the projection.
  VectorField grad = grad_field(psi, g);
  VectorField f([grad](const Vec& x) -> Vec { return -grad(x); }, "-grad");
  return Flow{std::move(S), g, std::move(f), "gradient"};
}

Flow newton_flow(std::shared_ptr<const FeasibleSet> S, const ScalarField& psi) {
  MetricField g = hessian_metric(psi);
  VectorField grad = grad_field(psi, g);
  VectorField f([grad](const Vec& x) -> Vec { return -grad(x); }, "-newton-dir");
  return Flow{std::move(S), std::move(g), std::move(f), "newton"};
}

Vec normal_cone_step(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                     const Vec& x, double dt) {
  if (S.tangent_cones(x).size() > 1) {
    throw IrregularityError("normal-cone step requires a single (Clarke-regular) branch");
  }
  const Vec fx = f(x);
  const Mat G = g.is_euclidean() ? Mat::Identity(x.size(), x.size()) : g.matrix(x);
  const std::vector<Vec> gens = S.normal_generators(x, g);
  Vec eta = Vec::Zero(x.size());
  if (!gens.empty()) eta = nnls_project(gens, G, fx).point;
  const Vec v = fx - eta;
  return S.restore(x + dt * v, g, &x);
}

} // namespace pds
