#pragma once

#include "pds/fields.hpp"
#include "pds/geometry.hpp"

#include <random>

namespace pds {

/// Metric projection of f(x) onto the tangent cone branches at x.
struct ProjectionResult {
  /// Argmin set: one vector per objective-minimal branch (deduplicated).
  std::vector<Vec> projected;
  /// f(x) - v for the primary (first minimal) branch.
  Vec normal_part;
  /// Nonzero dual weights of the primary branch, indexed by cone row /
  /// generator position.
  std::vector<std::pair<int, double>> active_multipliers;
  /// Objective |v - f(x)|_g^2 per branch, in branch order.
  std::vector<double> branch_values;

  const Vec& primary() const { return projected.front(); }
  bool multi_valued() const { return projected.size() > 1; }
};

/// Solves min_{v in T_x X} |v - f(x)|_{g(x)}^2 per branch. Halfspace-form
/// branches go through the dual nonnegative least squares on the normal-cone
/// generators G^{-1} a_i and set v = f(x) - sum alpha_i d_i.
ProjectionResult project_field(const FeasibleSet& S, const MetricField& g,
                               const VectorField& f, const Vec& x);

/// Same minimization for an explicit cone at a point (used by hull sampling
/// and the chart machinery).
ProjectionResult project_onto_cones(const std::vector<PolyhedralCone>& branches, const Mat& G,
                                    const Vec& fx);

struct MoreauReport {
  std::vector<double> value_residuals;  // | <f,v>_g - |v|_g^2 | per branch
  std::vector<double> orth_residuals;   // | <v, eta>_g | per branch
  double bound;                         // 1e-8 * (1 + |f|^2)
  bool ok;
};

MoreauReport moreau_check(const ProjectionResult& r, const MetricField& g, const Vec& x,
                          const Vec& f_x);

/// Sampled inner estimate of the Krasovskii regularization at x: convex-hull
/// vertices of all projected branch vectors over feasible points within
/// `radius` (the query point itself is always included).
struct KrasovskiiHull {
  std::vector<Vec> vertices;
  double sample_radius = 0.0;
  int sample_count = 0;

  bool contains(const Vec& v, double tol = 1e-9) const;
};

KrasovskiiHull krasovskii_hull(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                               const Vec& x, double radius, int count, std::mt19937_64& rng);

/// Generator form of N_x^g X for smooth sets: d_i = G(x)^{-1} grad h_i(x)^T
/// over the active indices; the zero cone at interior points.
PolyhedralCone normal_cone_generators(const SmoothInequalitySet& S, const MetricField& g,
                                      const Vec& x);

/// Ordered vertex set of the planar convex hull (monotone chain), pruned so
/// every returned point is in strict convex position within `tol`.
std::vector<Vec> convex_hull_vertices(std::vector<Vec> points, double tol = 1e-9);

} // namespace pds
