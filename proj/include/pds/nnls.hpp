#pragma once

#include "pds/types.hpp"

namespace pds {

struct NnlsResult {
  Vec coeffs;        // nonnegative combination weights, one per generator
  Vec point;         // sum_i coeffs[i] * generators[i], the projection
  double residual_sq; // squared G-distance from target to point
  int iterations;
};

/// Projects `target` onto cone{generators} in the inner product <u,v> = u' G v.
///
/// Lawson-Hanson active-set NNLS on the generator weights. Entering index is
/// the one with the most negative reduced gradient, lowest index on ties.
/// Throws SolverError past `max_iter` pivots (default 50 * #generators).
NnlsResult nnls_project(const std::vector<Vec>& generators, const Mat& G,
                        const Vec& target, int max_iter = -1);

/// Squared G-distance from `p` to the convex hull of `points`.
/// Solves the simplex-constrained least squares via NNLS on homogenized points.
double convex_hull_distance_sq(const std::vector<Vec>& points, const Vec& p);

/// True if `p` lies in conv(points) within `tol` (Euclidean distance).
bool in_convex_hull(const std::vector<Vec>& points, const Vec& p, double tol = 1e-9);

} // namespace pds
