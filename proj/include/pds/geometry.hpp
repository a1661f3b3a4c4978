#pragma once

#include "pds/cone.hpp"

#include <Eigen/Cholesky>
#include "pds/metric.hpp"
#include "pds/types.hpp"

#include <functional>
#include <memory>
#include <random>

namespace pds {

/// A feasible domain X. Implementations are immutable after construction;
/// concurrent read-only evaluation is safe.
class FeasibleSet {
public:
  virtual ~FeasibleSet() = default;

  virtual int dim() const = 0;
  virtual bool member(const Vec& x) const = 0;

  /// Tangent cone branches at a feasible x. Smooth sets return exactly one
  /// branch; irregular sets may return several whose union is the cone.
  virtual std::vector<PolyhedralCone> tangent_cones(const Vec& x) const = 0;

  /// Generators of the normal cone at x with respect to g. Empty at interior
  /// points (normal cone {0}).
  virtual std::vector<Vec> normal_generators(const Vec& x, const MetricField& g) const = 0;

  /// Up to `count` feasible points within Euclidean `radius` of x. The query
  /// point itself is not included; callers add it when needed.
  virtual std::vector<Vec> sample_neighborhood(const Vec& x, double radius, int count,
                                               std::mt19937_64& rng) const = 0;

  /// Nearest-point feasibility restoration of y in the metric g. `anchor`,
  /// when non-null, is a known feasible point used as a fallback direction.
  virtual Vec restore(const Vec& y, const MetricField& g, const Vec* anchor) const = 0;

  /// Sorted identifiers of the active pieces at x (constraint indices for
  /// smooth sets); drives the integrator's event log.
  virtual std::vector<int> active_ids(const Vec& x) const = 0;

  virtual double restoration_radius() const { return 1e6; }
};

struct SmoothSetOptions {
  double act_tol = 1e-8;      // active-set tolerance, scaled by (1 + |h_i|)
  double rank_tol = 1e-10;    // singular values below rank_tol * sigma_max count as zero
  double restore_tol = 1e-9;  // stationarity tolerance of the restored point
  int max_restore = 60;
  double restore_radius = 1e6;
};

/// X = {x | h(x) <= 0} with h componentwise smooth and full-rank active
/// Jacobians (constraint qualification). The Jacobian falls back to central
/// differences when not supplied.
class SmoothInequalitySet final : public FeasibleSet {
public:
  using HFn = std::function<Vec(const Vec&)>;
  using JacFn = std::function<Mat(const Vec&)>;

  SmoothInequalitySet(int dim, int num_constraints, HFn h, JacFn jac = nullptr,
                      SmoothSetOptions opts = {});

  static std::shared_ptr<SmoothInequalitySet> halfspace(Vec a, double b,
                                                        SmoothSetOptions opts = {});
  static std::shared_ptr<SmoothInequalitySet> polyhedron(Mat A, Vec b,
                                                         SmoothSetOptions opts = {});
  static std::shared_ptr<SmoothInequalitySet> box(Vec lo, Vec hi, SmoothSetOptions opts = {});
  static std::shared_ptr<SmoothInequalitySet> ball(Vec center, double radius,
                                                   SmoothSetOptions opts = {});
  /// All of R^n (no constraints).
  static std::shared_ptr<SmoothInequalitySet> whole_space(int dim, SmoothSetOptions opts = {});

  int dim() const override { return dim_; }
  int num_constraints() const { return m_; }
  bool member(const Vec& x) const override;

  Vec h(const Vec& x) const { return h_(x); }
  Mat jacobian(const Vec& x) const;

  /// Indices i with h_i(x) >= -act_tol, sorted ascending. Throws
  /// InfeasiblePointError when some h_i(x) > act_tol.
  std::vector<int> active_set(const Vec& x) const;

  /// Rows of the Jacobian restricted to `active`, with the constraint
  /// qualification (full row rank) enforced.
  Mat active_jacobian(const Vec& x, const std::vector<int>& active) const;

  std::vector<PolyhedralCone> tangent_cones(const Vec& x) const override;
  std::vector<Vec> normal_generators(const Vec& x, const MetricField& g) const override;
  std::vector<Vec> sample_neighborhood(const Vec& x, double radius, int count,
                                       std::mt19937_64& rng) const override;
  Vec restore(const Vec& y, const MetricField& g, const Vec* anchor) const override;
  std::vector<int> active_ids(const Vec& x) const override;
  double restoration_radius() const override { return opts_.restore_radius; }

  const SmoothSetOptions& options() const { return opts_; }

private:
  bool repair_feasibility(Vec& x, const Eigen::LLT<Mat>& Gllt) const;

  int dim_;
  int m_;
  HFn h_;
  JacFn jac_;
  SmoothSetOptions opts_;
};

/// Feasible set described by user-supplied callbacks, for irregular domains
/// not representable by full-rank smooth inequalities.
class OracleSet final : public FeasibleSet {
public:
  using MemberFn = std::function<bool(const Vec&)>;
  using BranchFn = std::function<std::vector<PolyhedralCone>(const Vec&)>;
  using SamplerFn = std::function<std::vector<Vec>(const Vec&, double, int, std::mt19937_64&)>;
  using ProjectorFn = std::function<Vec(const Vec&)>;
  using NormalFn = std::function<std::vector<Vec>(const Vec&, const MetricField&)>;
  using ActiveFn = std::function<std::vector<int>(const Vec&)>;

  OracleSet(int dim, MemberFn member, BranchFn branches, SamplerFn sampler,
            ProjectorFn projector, NormalFn normals = nullptr, ActiveFn active = nullptr);

  int dim() const override { return dim_; }
  bool member(const Vec& x) const override { return member_(x); }
  std::vector<PolyhedralCone> tangent_cones(const Vec& x) const override;
  std::vector<Vec> normal_generators(const Vec& x, const MetricField& g) const override;
  std::vector<Vec> sample_neighborhood(const Vec& x, double radius, int count,
                                       std::mt19937_64& rng) const override;
  Vec restore(const Vec& y, const MetricField& g, const Vec* anchor) const override;
  std::vector<int> active_ids(const Vec& x) const override;

private:
  int dim_;
  MemberFn member_;
  BranchFn branches_;
  SamplerFn sampler_;
  ProjectorFn projector_;
  NormalFn normals_;
  ActiveFn active_;
};

// Operation-style entry points mirroring the module surface.
std::vector<int> active_set(const SmoothInequalitySet& S, const Vec& x);
std::vector<PolyhedralCone> tangent_cone(const FeasibleSet& S, const Vec& x);
Vec project_to_set(const FeasibleSet& S, const Vec& y, const MetricField& g);

} // namespace pds
