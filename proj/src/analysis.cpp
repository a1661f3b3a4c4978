#include "pds/analysis.hpp"

#include "pds/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pds {

const char* to_string(ProxVerdict v) {
  switch (v) {
    case ProxVerdict::prox_regular_evidence: return "prox_regular_evidence";
    case ProxVerdict::divergence_evidence: return "divergence_evidence";
    case ProxVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

ProxReport prox_estimate(const FeasibleSet& S, const MetricField& g, const Vec& x,
                         std::vector<double> radii, int samples, uint64_t seed) {
  ProxReport report;
  report.point = x;
  report.radii = radii;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (double r : radii) {
    std::vector<Vec> pts = S.sample_neighborhood(x, r, std::max(16, samples / 2), rng);
    pts.push_back(x);
    const Mat I = Mat::Identity(x.size(), x.size());

    double L = 0.0;
    auto ratio = [&](const Vec& y, const Vec& z) {
      const Vec d = z - y;
      // Resolution limit of the estimator: boundary samples carry residuals
      // up to ~1e-13, and pairs closer than their distance to x amplify
      // rounding in the inner product. Skip pairs below either floor.
      const double pair_scale = (y - x).norm() + (z - x).norm();
      if (d.norm() < std::max(2e-6, 1e-6 * pair_scale)) return;
      const Mat Gy = g.is_euclidean() ? I : g.matrix(y);
      const double dist_sq = d.dot(Gy * d);
      if (dist_sq < 1e-28) return;
      std::vector<Vec> gens;
      try {
        gens = S.normal_generators(y, g);
      } catch (const DegenerateRankError&) {
        return;
      }
      if (gens.empty()) return;
      Vec eta = Vec::Zero(x.size());
      for (const Vec& gen : gens) eta += unif(rng) * gen;
      const double eta_norm = std::sqrt(std::max(0.0, eta.dot(Gy * eta)));
      if (eta_norm < 1e-14) return;
      L = std::max(L, eta.dot(Gy * d) / (eta_norm * dist_sq));
    };

    std::uniform_int_distribution<size_t> pick(0, pts.size() - 1);
    for (int s = 0; s < samples; ++s) ratio(pts[pick(rng)], pts[pick(rng)]);
    // Scale-matched pairs: the proximal ratio peaks on nearby points at a
    // common distance from x, which random pairing rarely hits.
    std::sort(pts.begin(), pts.end(),
              [&x](const Vec& a, const Vec& b) { return (a - x).norm() < (b - x).norm(); });
    for (size_t i = 0; i < pts.size(); ++i) {
      for (size_t off = 1; off <= 3 && i + off < pts.size(); ++off) {
        ratio(pts[i], pts[i + off]);
        ratio(pts[i + off], pts[i]);
      }
    }
    report.L_estimates.push_back(std::max(0.0, L));
  }

  // Verdict from the three smallest radii, largest to smallest.
  std::vector<std::pair<double, double>> by_radius; // (radius, L)
  for (size_t i = 0; i < radii.size(); ++i) by_radius.emplace_back(radii[i], report.L_estimates[i]);
  std::sort(by_radius.begin(), by_radius.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  if (by_radius.size() > 3) by_radius.erase(by_radius.begin(), by_radius.end() - 3);

  if (by_radius.size() < 2) {
    report.verdict = ProxVerdict::inconclusive;
    return report;
  }
  bool all_double = true;
  bool all_tame = true;
  for (size_t i = 0; i + 1 < by_radius.size(); ++i) {
    const double coarse = by_radius[i].second;
    const double fine = by_radius[i + 1].second;
    if (!(fine >= 2.0 * coarse && fine > 0.0)) all_double = false;
    if (!(fine <= std::max(1.5 * coarse, 1e-12))) all_tame = false;
  }
  if (all_double) {
    report.verdict = ProxVerdict::divergence_evidence;
  } else if (all_tame) {
    report.verdict = ProxVerdict::prox_regular_evidence;
  } else {
    report.verdict = ProxVerdict::inconclusive;
  }
  return report;
}

double one_sided_lipschitz(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                           const Vec& x, double radius, int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Mat Gx = g.is_euclidean() ? Mat::Identity(x.size(), x.size()) : g.matrix(x);

  ProjectionResult base = project_field(S, g, f, x);
  if (base.multi_valued()) {
    throw IrregularityError("one-sided Lipschitz estimate hit a multi-branch projection");
  }
  const Vec vx = base.primary();

  std::vector<Vec> pts = S.sample_neighborhood(x, radius, samples, rng);
  double estimate = -std::numeric_limits<double>::infinity();
  for (const Vec& y : pts) {
    const Vec d = y - x;
    const double dist_sq = d.dot(Gx * d);
    if (dist_sq < 1e-28) continue;
    ProjectionResult ry = project_field(S, g, f, y);
    if (ry.multi_valued()) {
      throw IrregularityError("one-sided Lipschitz estimate hit a multi-branch projection");
    }
    estimate = std::max(estimate, (ry.primary() - vx).dot(Gx * d) / dist_sq);
  }
  if (!std::isfinite(estimate)) estimate = 0.0;
  return estimate;
}

UniquenessReport uniqueness_probe(const FeasibleSet& S, const MetricField& g,
                                  const VectorField& f, const Vec& x0, double horizon,
                                  const IntegratorConfig& cfg, double perturbation,
                                  const UniquenessOptions& opts) {
  UniquenessReport report;
  report.perturbation = perturbation;

  std::mt19937_64 rng(opts.seed);
  std::vector<Trajectory> bundle;
  bundle.push_back(integrate(S, g, f, x0, horizon, cfg));
  std::vector<Vec> starts = S.sample_neighborhood(x0, perturbation, opts.bundle, rng);
  for (const Vec& s : starts) bundle.push_back(integrate(S, g, f, s, horizon, cfg));

  report.lipschitz = one_sided_lipschitz(S, g, f, x0, opts.l_radius, opts.l_samples, opts.seed);
  // Trajectories that stopped early (equilibrium) are constant-extended by
  // Trajectory::at. The envelope exponent is clamped at zero: the probe looks
  // for growth beyond proportionality.
  const double L_env = std::max(0.0, report.lipschitz);

  double t_end = horizon;
  for (const Trajectory& tr : bundle) {
    if (tr.termination == Termination::restoration_failure ||
        tr.termination == Termination::step_floor) {
      t_end = std::min(t_end, tr.final_time());
    }
  }

  const int grid = 256;
  for (int k = 0; k <= grid; ++k) {
    const double t = t_end * k / grid;
    double div = 0.0;
    for (size_t a = 0; a < bundle.size(); ++a) {
      const Vec xa = bundle[a].at(t);
      for (size_t b = a + 1; b < bundle.size(); ++b) {
        div = std::max(div, (xa - bundle[b].at(t)).norm());
      }
    }
    report.times.push_back(t);
    report.divergence.push_back(div);
    report.max_divergence = std::max(report.max_divergence, div);
    if (div > 10.0 * perturbation * std::exp(L_env * t)) report.flagged = true;
  }
  report.normalized = perturbation > 0 ? report.max_divergence / perturbation : 0.0;
  return report;
}

LyapunovLog lasalle_monitor(const FeasibleSet& S, const MetricField& g, const ScalarField& psi,
                            const Trajectory& traj, double monotone_tol) {
  (void)S;
  LyapunovLog log;
  log.times = traj.times;
  for (const Vec& x : traj.states) log.values.push_back(psi.value(x));
  log.max_lie = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < traj.velocities.size(); ++k) {
    const double lie = psi.gradient(traj.states[k]).dot(traj.velocities[k]);
    log.lie_samples.push_back(lie);
    log.max_lie = std::max(log.max_lie, lie);
  }
  if (log.lie_samples.empty()) log.max_lie = 0.0;
  for (size_t k = 0; k + 1 < log.values.size(); ++k) {
    if (log.values[k + 1] > log.values[k] + monotone_tol) log.monotone = false;
  }
  // Trailing 10% of steps approximates the omega-limit set.
  const size_t nsteps = traj.velocities.size();
  const size_t start = nsteps - std::max<size_t>(1, nsteps / 10);
  for (size_t k = start; k < nsteps; ++k) {
    log.trailing_sup_speed =
        std::max(log.trailing_sup_speed, g.norm(traj.states[k], traj.velocities[k]));
  }
  return log;
}

double equivalence_residual(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                            const Vec& x, double radius, int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProjectionResult proj = project_field(S, g, f, x);
  KrasovskiiHull hull = krasovskii_hull(S, g, f, x, radius, samples, rng);

  const std::vector<PolyhedralCone> branches = S.tangent_cones(x);
  std::vector<Vec> filtered;
  for (const Vec& v : hull.vertices) {
    for (const PolyhedralCone& cone : branches) {
      if (cone.contains(v, 1e-7)) {
        filtered.push_back(v);
        break;
      }
    }
  }
  if (filtered.empty()) {
    // The projection vectors always belong to both sets; an empty filter can
    // only be produced by sampling noise. Report the conservative distance.
    double worst = 0.0;
    for (const Vec& p : proj.projected) worst = std::max(worst, p.norm());
    return worst;
  }

  auto dist_to = [](const Vec& a, const std::vector<Vec>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& s : set) best = std::min(best, (a - s).norm());
    return best;
  };
  double h = 0.0;
  for (const Vec& a : filtered) h = std::max(h, dist_to(a, proj.projected));
  for (const Vec& b : proj.projected) h = std::max(h, dist_to(b, filtered));
  return h;
}

} // namespace pds
