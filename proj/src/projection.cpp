#include "pds/projection.hpp"

#include "pds/nnls.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace pds {

namespace {

struct BranchSolve {
  Vec v;
  Vec eta;
  std::vector<std::pair<int, double>> multipliers;
  double value;
};

BranchSolve solve_branch(const PolyhedralCone& cone, const Mat& G, const Vec& fx) {
  BranchSolve out;
  const int n = static_cast<int>(fx.size());
  if (cone.is_full()) {
    out.v = fx;
    out.eta = Vec::Zero(n);
    out.value = 0.0;
    return out;
  }
  if (cone.has_halfspaces()) {
    const Mat& A = cone.halfspace_rows();
    Eigen::LLT<Mat> llt(G);
    std::vector<Vec> polar;
    polar.reserve(A.rows());
    for (int r = 0; r < A.rows(); ++r) polar.push_back(llt.solve(A.row(r).transpose()));
    NnlsResult nr = nnls_project(polar, G, fx);
    out.eta = nr.point;
    out.v = fx - nr.point;
    out.value = out.eta.dot(G * out.eta);
    for (int i = 0; i < nr.coeffs.size(); ++i) {
      if (nr.coeffs[i] != 0.0) out.multipliers.emplace_back(i, nr.coeffs[i]);
    }
    return out;
  }
  NnlsResult nr = nnls_project(cone.generators(), G, fx);
  out.v = nr.point;
  out.eta = fx - nr.point;
  out.value = nr.residual_sq;
  for (int i = 0; i < nr.coeffs.size(); ++i) {
    if (nr.coeffs[i] != 0.0) out.multipliers.emplace_back(i, nr.coeffs[i]);
  }
  return out;
}

} // namespace

ProjectionResult project_onto_cones(const std::vector<PolyhedralCone>& branches, const Mat& G,
                                    const Vec& fx) {
  std::vector<BranchSolve> solves;
  solves.reserve(branches.size());
  for (const PolyhedralCone& cone : branches) solves.push_back(solve_branch(cone, G, fx));

  double best = solves.front().value;
  for (const BranchSolve& s : solves) best = std::min(best, s.value);
  const double tie_tol = 1e-9 * (1.0 + std::abs(best));

  ProjectionResult result;
  int primary = -1;
  for (size_t b = 0; b < solves.size(); ++b) {
    result.branch_values.push_back(solves[b].value);
    if (solves[b].value <= best + tie_tol) {
      if (primary < 0) primary = static_cast<int>(b);
      bool duplicate = false;
      for (const Vec& seen : result.projected) {
        if ((seen - solves[b].v).norm() <= 1e-10 * (1.0 + seen.norm())) duplicate = true;
      }
      if (!duplicate) result.projected.push_back(solves[b].v);
    }
  }
  result.normal_part = solves[primary].eta;
  result.active_multipliers = solves[primary].multipliers;
  return result;
}

ProjectionResult project_field(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                               const Vec& x) {
  const Mat G = g.is_euclidean() ? Mat::Identity(x.size(), x.size()) : g.matrix(x);
  return project_onto_cones(S.tangent_cones(x), G, f(x));
}

MoreauReport moreau_check(const ProjectionResult& r, const MetricField& g, const Vec& x,
                          const Vec& f_x) {
  MoreauReport report;
  report.bound = 1e-8 * (1.0 + f_x.squaredNorm());
  report.ok = true;
  for (const Vec& v : r.projected) {
    const Vec eta = f_x - v;
    const double value_res = std::abs(g.inner(x, f_x, v) - g.inner(x, v, v));
    const double orth_res = std::abs(g.inner(x, v, eta));
    report.value_residuals.push_back(value_res);
    report.orth_residuals.push_back(orth_res);
    if (value_res > report.bound || orth_res > report.bound) report.ok = false;
  }
  return report;
}

std::vector<Vec> convex_hull_vertices(std::vector<Vec> points, double tol) {
  // Deduplicate first.
  std::vector<Vec> pts;
  for (const Vec& p : points) {
    bool seen = false;
    for (const Vec& q : pts) {
      if ((p - q).norm() <= 1e-12 * (1.0 + q.norm())) seen = true;
    }
    if (!seen) pts.push_back(p);
  }
  if (pts.size() <= 1) return pts;

  std::vector<Vec> hull;
  if (pts.front().size() == 2) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
      return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    double scale = 1.0;
    for (const Vec& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double area_tol = 1e-14 * scale * scale;
    auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Vec> chain(2 * pts.size() + 1, Vec());
    int k = 0;
    for (const Vec& p : pts) { // lower
      while (k >= 2 && cross(chain[k - 2], chain[k - 1], p) <= area_tol) --k;
      chain[k++] = p;
    }
    const int lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) { // upper
      while (k >= lower && cross(chain[k - 2], chain[k - 1], *it) <= area_tol) --k;
      chain[k++] = *it;
    }
    hull.assign(chain.begin(), chain.begin() + (k - 1));
  } else {
    hull = pts;
  }

  // Prune to strict convex position: no vertex within tol of the hull of the
  // others. Also covers dimensions > 2, where the chain is skipped.
  bool changed = true;
  while (changed && hull.size() > 1) {
    changed = false;
    for (size_t i = 0; i < hull.size(); ++i) {
      std::vector<Vec> others;
      others.reserve(hull.size() - 1);
      for (size_t j = 0; j < hull.size(); ++j) {
        if (j != i) others.push_back(hull[j]);
      }
      if (in_convex_hull(others, hull[i], tol)) {
        hull.erase(hull.begin() + i);
        changed = true;
        break;
      }
    }
  }
  return hull;
}

bool KrasovskiiHull::contains(const Vec& v, double tol) const {
  return in_convex_hull(vertices, v, tol);
}

KrasovskiiHull krasovskii_hull(const FeasibleSet& S, const MetricField& g, const VectorField& f,
                               const Vec& x, double radius, int count, std::mt19937_64& rng) {
  std::vector<Vec> samples = S.sample_neighborhood(x, radius, std::max(0, count - 1), rng);
  samples.push_back(x);

  std::vector<Vec> vectors;
  for (const Vec& y : samples) {
    const Mat G = g.is_euclidean() ? Mat::Identity(x.size(), x.size()) : g.matrix(y);
    ProjectionResult r = project_onto_cones(S.tangent_cones(y), G, f(y));
    for (Vec& v : r.projected) vectors.push_back(std::move(v));
  }

  KrasovskiiHull hull;
  hull.sample_radius = radius;
  hull.sample_count = static_cast<int>(samples.size());
  hull.vertices = convex_hull_vertices(std::move(vectors));
  return hull;
}

PolyhedralCone normal_cone_generators(const SmoothInequalitySet& S, const MetricField& g,
                                      const Vec& x) {
  std::vector<Vec> gens = S.normal_generators(x, g);
  if (gens.empty()) return PolyhedralCone::zero(S.dim());
  return PolyhedralCone::from_generators(std::move(gens));
}

} // namespace pds
