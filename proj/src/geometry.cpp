#include "pds/geometry.hpp"

#include "pds/fields.hpp"
#include "pds/nnls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace pds {

namespace {

double active_tol(double act_tol, double hi) { return act_tol * (1.0 + std::abs(hi)); }

Vec rot90(const Vec& v) {
  Vec w(2);
  w[0] = -v[1];
  w[1] = v[0];
  return w;
}

} // namespace

// ---------------------------------------------------------------------------
// SmoothInequalitySet
// ---------------------------------------------------------------------------

SmoothInequalitySet::SmoothInequalitySet(int dim, int num_constraints, HFn h, JacFn jac,
                                         SmoothSetOptions opts)
    : dim_(dim), m_(num_constraints), h_(std::move(h)), jac_(std::move(jac)), opts_(opts) {}

std::shared_ptr<SmoothInequalitySet> SmoothInequalitySet::halfspace(Vec a, double b,
                                                                    SmoothSetOptions opts) {
  Mat A(1, a.size());
  A.row(0) = a.transpose();
  Vec bb(1);
  bb[0] = b;
  return polyhedron(A, bb, opts);
}

std::shared_ptr<SmoothInequalitySet> SmoothInequalitySet::polyhedron(Mat A, Vec b,
                                                                     SmoothSetOptions opts) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  return std::make_shared<SmoothInequalitySet>(
      n, m, [A, b](const Vec& x) -> Vec { return A * x - b; },
      [A](const Vec&) -> Mat { return A; }, opts);
}

std::shared_ptr<SmoothInequalitySet> SmoothInequalitySet::box(Vec lo, Vec hi,
                                                              SmoothSetOptions opts) {
  const int n = static_cast<int>(lo.size());
  Mat A(2 * n, n);
  Vec b(2 * n);
  A.topRows(n) = -Mat::Identity(n, n);
  A.bottomRows(n) = Mat::Identity(n, n);
  b.head(n) = -lo;
  b.tail(n) = hi;
  return polyhedron(A, b, opts);
}

std::shared_ptr<SmoothInequalitySet> SmoothInequalitySet::ball(Vec center, double radius,
                                                               SmoothSetOptions opts) {
  const int n = static_cast<int>(center.size());
  return std::make_shared<SmoothInequalitySet>(
      n, 1,
      [center, radius](const Vec& x) -> Vec {
        Vec h(1);
        h[0] = (x - center).squaredNorm() - radius * radius;
        return h;
      },
      [center](const Vec& x) -> Mat {
        Mat J(1, x.size());
        J.row(0) = 2.0 * (x - center).transpose();
        return J;
      },
      opts);
}

std::shared_ptr<SmoothInequalitySet> SmoothInequalitySet::whole_space(int dim,
                                                                      SmoothSetOptions opts) {
  return std::make_shared<SmoothInequalitySet>(
      dim, 0, [](const Vec&) { return Vec(0); }, [dim](const Vec&) { return Mat(0, dim); },
      opts);
}

bool SmoothInequalitySet::member(const Vec& x) const {
  const Vec hx = h_(x);
  for (int i = 0; i < hx.size(); ++i) {
    if (hx[i] > active_tol(opts_.act_tol, hx[i])) return false;
  }
  return true;
}

Mat SmoothInequalitySet::jacobian(const Vec& x) const {
  if (jac_) return jac_(x);
  Mat J(m_, dim_);
  Vec xp = x, xm = x;
  for (int j = 0; j < dim_; ++j) {
    const double step = fd_step(x[j]);
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    J.col(j) = (h_(xp) - h_(xm)) / (2.0 * step);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

std::vector<int> SmoothInequalitySet::active_set(const Vec& x) const {
  const Vec hx = h_(x);
  std::vector<int> active;
  for (int i = 0; i < hx.size(); ++i) {
    const double tol = active_tol(opts_.act_tol, hx[i]);
    if (hx[i] > tol) throw InfeasiblePointError(i, hx[i]);
    if (hx[i] >= -tol) active.push_back(i);
  }
  return active;
}

Mat SmoothInequalitySet::active_jacobian(const Vec& x, const std::vector<int>& active) const {
  Mat J = jacobian(x);
  Mat Ja(active.size(), dim_);
  for (size_t r = 0; r < active.size(); ++r) Ja.row(r) = J.row(active[r]);
  if (Ja.rows() > 0) {
    Eigen::JacobiSVD<Mat> svd(Ja);
    const Vec sv = svd.singularValues();
    if (Ja.rows() > Ja.cols() || sv.minCoeff() <= opts_.rank_tol * sv.maxCoeff()) {
      std::ostringstream oss;
      oss << "active constraint Jacobian is rank deficient (" << Ja.rows() << " active rows, "
          << "singular value ratio "
          << (sv.maxCoeff() > 0 ? sv.minCoeff() / sv.maxCoeff() : 0.0) << ")";
      throw DegenerateRankError(oss.str());
    }
  }
  return Ja;
}

std::vector<PolyhedralCone> SmoothInequalitySet::tangent_cones(const Vec& x) const {
  const std::vector<int> active = active_set(x);
  if (active.empty()) return {PolyhedralCone::full(dim_)};
  return {PolyhedralCone::from_halfspaces(active_jacobian(x, active))};
}

std::vector<Vec> SmoothInequalitySet::normal_generators(const Vec& x,
                                                        const MetricField& g) const {
  const std::vector<int> active = active_set(x);
  if (active.empty()) return {};
  const Mat Ja = active_jacobian(x, active);
  std::vector<Vec> gens;
  gens.reserve(active.size());
  if (g.is_euclidean()) {
    for (int r = 0; r < Ja.rows(); ++r) gens.push_back(Ja.row(r).transpose());
  } else {
    Eigen::LLT<Mat> llt(g.matrix(x));
    for (int r = 0; r < Ja.rows(); ++r) gens.push_back(llt.solve(Ja.row(r).transpose()));
  }
  return gens;
}

std::vector<Vec> SmoothInequalitySet::sample_neighborhood(const Vec& x, double radius, int count,
                                                          std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  const int max_attempts = 40 * count;
  const MetricField euclid = MetricField::euclidean();
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count;
       ++attempt) {
    Vec dir(dim_);
    for (int i = 0; i < dim_; ++i) dir[i] = gauss(rng);
    const double nrm = dir.norm();
    if (nrm == 0.0) continue;
    const double r = radius * std::pow(unif(rng), 1.0 / dim_);
    Vec y = x + (r / nrm) * dir;
    if (member(y)) {
      out.push_back(std::move(y));
      continue;
    }
    // Rejected draws are projected back, which supplies boundary samples.
    try {
      Vec proj = restore(y, euclid, &x);
      if ((proj - x).norm() <= radius * (1.0 + 1e-9) && member(proj)) {
        out.push_back(std::move(proj));
      }
    } catch (const RestorationError&) {
      // skip
    }
  }
  if (out.empty()) {
    throw SamplerError("neighborhood sampler found no feasible points");
  }
  return out;
}

std::vector<int> SmoothInequalitySet::active_ids(const Vec& x) const { return active_set(x); }

// Gauss-Newton root finding on the violated-or-active constraints: a
// minimum-G-norm correction solving h_W(x) = 0. Quadratically convergent
// from small violations; plain damping handles larger ones. Near-active
// constraints are polished onto the surface so that boundary samples carry
// machine-precision residuals rather than act_tol-sized ones.
bool SmoothInequalitySet::repair_feasibility(Vec& x, const Eigen::LLT<Mat>& Gllt) const {
  for (int iter = 0; iter < opts_.max_restore; ++iter) {
    const Vec hx = h_(x);
    std::vector<int> working;
    double residual = 0.0;
    for (int i = 0; i < hx.size(); ++i) {
      if (hx[i] > -active_tol(opts_.act_tol, hx[i])) {
        working.push_back(i);
        residual = std::max(residual, std::abs(hx[i]));
      }
    }
    if (working.empty() || residual <= 1e-13) return true;

    const Mat J = jacobian(x);
    Mat Jw(working.size(), dim_);
    Vec hw(working.size());
    for (size_t r = 0; r < working.size(); ++r) {
      Jw.row(r) = J.row(working[r]);
      hw[r] = hx[working[r]];
    }
    const Mat GinvJt = Gllt.solve(Jw.transpose());
    const Mat S = Jw * GinvJt;
    Vec lambda = S.ldlt().solve(hw);
    if ((S * lambda - hw).norm() > 1e-8 * (1.0 + hw.norm())) {
      lambda = S.completeOrthogonalDecomposition().solve(hw);
    }
    const Vec delta = -GinvJt * lambda;

    double t = 1.0;
    for (int ls = 0; ls < 12; ++ls) {
      const Vec hn = h_(x + t * delta);
      double after = 0.0;
      for (int i : working) after = std::max(after, std::abs(hn[i]));
      if (after < residual * (1.0 - 0.25 * t) || after <= 1e-13) {
        x += t * delta;
        break;
      }
      t *= 0.5;
      if (ls == 11) x += t * delta;
    }
  }
  return member(x);
}

Vec SmoothInequalitySet::restore(const Vec& y, const MetricField& g, const Vec* anchor) const {
  if (member(y)) return y;

  const Mat G = g.is_euclidean() ? Mat::Identity(dim_, dim_) : g.matrix(y);
  Eigen::LLT<Mat> Gllt(G);

  // Phase 1: reach the feasible set with a minimum-norm correction.
  Vec x = y;
  bool feasible = repair_feasibility(x, Gllt);
  if (!feasible && anchor != nullptr && member(*anchor)) {
    // Bisect along the segment toward the last feasible point.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (member(*anchor + mid * (y - *anchor)) ? lo : hi) = mid;
    }
    x = *anchor + lo * (y - *anchor);
    feasible = member(x);
  }
  if (!feasible) {
    const Vec hx = h_(x);
    throw RestorationError("feasibility restoration did not converge", x,
                           hx.size() > 0 ? hx.maxCoeff() : 0.0);
  }

  // Phase 2: projected descent on |x - y|_G^2 over the set, until the
  // tangential gradient is below the stationarity tolerance.
  auto objective = [&](const Vec& p) { return (p - y).dot(G * (p - y)); };
  for (int iter = 0; iter < opts_.max_restore; ++iter) {
    const std::vector<int> active = active_set(x);
    Vec v = y - x; // -grad of the objective in the metric G
    if (!active.empty()) {
      // Project onto the tangent cone through the dual generators.
      const Mat Ja = active_jacobian(x, active);
      std::vector<Vec> polar;
      polar.reserve(active.size());
      for (int r = 0; r < Ja.rows(); ++r) polar.push_back(Gllt.solve(Ja.row(r).transpose()));
      v -= nnls_project(polar, G, v).point;
    }
    const double v_norm = std::sqrt(std::max(0.0, v.dot(G * v)));
    if (v_norm <= opts_.restore_tol * (1.0 + (y - x).norm())) break;

    const double phi = objective(x);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 20; ++ls) {
      Vec cand = x + t * v;
      if (!member(cand) && !repair_feasibility(cand, Gllt)) {
        t *= 0.5;
        continue;
      }
      if (objective(cand) <= phi - 1e-4 * t * v_norm * v_norm) {
        x = std::move(cand);
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }

  if ((x - y).norm() > opts_.restore_radius) {
    throw RestorationError("restored point beyond the restoration radius", x, (x - y).norm());
  }
  return x;
}

// ---------------------------------------------------------------------------
// OracleSet
// ---------------------------------------------------------------------------

OracleSet::OracleSet(int dim, MemberFn member, BranchFn branches, SamplerFn sampler,
                     ProjectorFn projector, NormalFn normals, ActiveFn active)
    : dim_(dim), member_(std::move(member)), branches_(std::move(branches)),
      sampler_(std::move(sampler)), projector_(std::move(projector)),
      normals_(std::move(normals)), active_(std::move(active)) {}

std::vector<PolyhedralCone> OracleSet::tangent_cones(const Vec& x) const {
  if (!member_(x)) throw InfeasiblePointError(-1, 0.0);
  std::vector<PolyhedralCone> branches = branches_(x);
  if (branches.empty()) throw std::logic_error("oracle returned an empty branch list");
  return branches;
}

std::vector<Vec> OracleSet::normal_generators(const Vec& x, const MetricField& g) const {
  if (normals_) return normals_(x, g);
  const std::vector<PolyhedralCone> branches = branches_(x);
  if (branches.size() != 1) return {}; // normal cone of a union is not convex
  const PolyhedralCone& cone = branches.front();
  std::vector<Vec> gens;
  if (cone.has_halfspaces()) {
    const Mat& A = cone.halfspace_rows();
    if (A.rows() == 0) return {};
    if (g.is_euclidean()) {
      for (int r = 0; r < A.rows(); ++r) gens.push_back(A.row(r).transpose());
    } else {
      Eigen::LLT<Mat> llt(g.matrix(x));
      for (int r = 0; r < A.rows(); ++r) gens.push_back(llt.solve(A.row(r).transpose()));
    }
    return gens;
  }
  if (dim_ == 2) {
    // Polar of a generator-form cone in the plane: each tangent generator t
    // contributes the boundary rays of {eta | <eta, t>_g <= 0}.
    const Mat G = g.is_euclidean() ? Mat::Identity(2, 2) : g.matrix(x);
    std::vector<Vec> candidates;
    for (const Vec& t : cone.generators()) {
      const Vec gt = G * t;
      candidates.push_back(rot90(gt));
      candidates.push_back(-rot90(gt));
      candidates.push_back(-t);
    }
    // Keep candidates polar to every generator.
    for (const Vec& c : candidates) {
      bool ok = true;
      for (const Vec& t : cone.generators()) {
        if (c.dot(G * t) > 1e-12 * (1.0 + c.norm()) * (1.0 + t.norm())) ok = false;
      }
      if (ok) gens.push_back(c);
    }
  }
  return gens;
}

std::vector<Vec> OracleSet::sample_neighborhood(const Vec& x, double radius, int count,
                                                std::mt19937_64& rng) const {
  std::vector<Vec> pts = sampler_(x, radius, count, rng);
  if (pts.empty()) throw SamplerError("oracle neighborhood sampler produced no points");
  for (const Vec& p : pts) {
    if (!member_(p)) throw std::logic_error("oracle sampler produced an infeasible point");
  }
  return pts;
}

Vec OracleSet::restore(const Vec& y, const MetricField& g, const Vec* /*anchor*/) const {
  (void)g;
  Vec p = projector_(y);
  if (!member_(p)) {
    throw RestorationError("oracle projector returned an infeasible point", p, 0.0);
  }
  return p;
}

std::vector<int> OracleSet::active_ids(const Vec& x) const {
  if (active_) return active_(x);
  return {};
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

std::vector<int> active_set(const SmoothInequalitySet& S, const Vec& x) {
  return S.active_set(x);
}

std::vector<PolyhedralCone> tangent_cone(const FeasibleSet& S, const Vec& x) {
  return S.tangent_cones(x);
}

Vec project_to_set(const FeasibleSet& S, const Vec& y, const MetricField& g) {
  return S.restore(y, g, nullptr);
}

} // namespace pds
