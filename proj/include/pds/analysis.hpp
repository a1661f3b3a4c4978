#pragma once

#include "pds/dynamics.hpp"

namespace pds {

enum class ProxVerdict { prox_regular_evidence, divergence_evidence, inconclusive };
const char* to_string(ProxVerdict v);

struct ProxReport {
  Vec point;
  std::vector<double> radii;       // as queried
  std::vector<double> L_estimates; // per radius, clamped below at 0
  ProxVerdict verdict = ProxVerdict::inconclusive;
};

/// Samples the proximal inequality <eta, z-y>_g <= L |eta|_g |z-y|_g^2 on
/// feasible pairs near x with unit normals eta at y, per radius. The verdict
/// is divergence evidence only when the estimates grow monotonically by a
/// factor >= 2 across the three smallest radii.
ProxReport prox_estimate(const FeasibleSet& S, const MetricField& g, const Vec& x,
                         std::vector<double> radii, int samples, uint64_t seed = 0);

/// max over sampled y of <Pf(y)-Pf(x), y-x>_{g(x)} / |y-x|_{g(x)}^2.
/// Throws IrregularityError when a multi-branch projection is encountered.
double one_sided_lipschitz(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                           const Vec& x, double radius, int samples, uint64_t seed = 0);

struct UniquenessReport {
  double perturbation = 0.0;
  double lipschitz = 0.0;          // one-sided estimate used in the envelope
  double max_divergence = 0.0;     // max over time of max pairwise distance
  double normalized = 0.0;         // max_divergence / perturbation
  bool flagged = false;            // divergence escaped the Gronwall envelope
  std::vector<double> times;
  std::vector<double> divergence;  // max pairwise distance per time
};

struct UniquenessOptions {
  int bundle = 6;          // number of perturbed starts
  double l_radius = 0.5;   // neighborhood radius for the Lipschitz estimate
  int l_samples = 400;
  uint64_t seed = 0;
};

/// Integrates a bundle from x0 and feasible perturbations of size <=
/// `perturbation`; flags non-uniqueness evidence when the pairwise divergence
/// exceeds exp(L t) * perturbation * 10.
UniquenessReport uniqueness_probe(const FeasibleSet& S, const MetricField& g,
                                  const VectorField& f, const Vec& x0, double horizon,
                                  const IntegratorConfig& cfg, double perturbation,
                                  const UniquenessOptions& opts = {});

struct LyapunovLog {
  std::vector<double> times;
  std::vector<double> values;      // psi along states
  std::vector<double> lie_samples; // D_x psi (v) per step
  double max_lie = 0.0;
  double trailing_sup_speed = 0.0; // sup |v|_g over the trailing 10% of steps
  bool monotone = true;            // non-increasing within tolerance
};

/// Evaluates psi along a trajectory, records the Lie-derivative samples, and
/// marks the trailing window as the omega-limit approximation.
LyapunovLog lasalle_monitor(const FeasibleSet& S, const MetricField& g, const ScalarField& psi,
                            const Trajectory& traj, double monotone_tol = 1e-8);

/// Hausdorff distance between the tangent-cone-filtered Krasovskii hull
/// vertices and the projection set at x. Near zero on Clarke-regular
/// scenarios; bounded away from zero at irregular points.
double equivalence_residual(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                            const Vec& x, double radius, int samples, uint64_t seed = 0);

} // namespace pds
