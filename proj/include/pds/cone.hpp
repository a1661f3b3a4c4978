#pragma once

#include "pds/metric.hpp"
#include "pds/types.hpp"

#include <optional>
#include <random>

namespace pds {

/// Finitely generated convex cone, kept in halfspace form {v | A v <= 0},
/// generator form cone(d_1, ..., d_m), or both.
class PolyhedralCone {
public:
  static PolyhedralCone from_halfspaces(Mat A);
  static PolyhedralCone from_generators(std::vector<Vec> gens);
  static PolyhedralCone from_both(Mat A, std::vector<Vec> gens);
  /// All of R^n (zero halfspace rows).
  static PolyhedralCone full(int n);
  /// The trivial cone {0} (empty generator list).
  static PolyhedralCone zero(int n);

  int dim() const { return dim_; }
  bool has_halfspaces() const { return halfspaces_.has_value(); }
  bool has_generators() const { return generators_.has_value(); }
  /// No halfspace rows and no generator list: the whole space.
  bool is_full() const;

  const Mat& halfspace_rows() const { return *halfspaces_; }
  const std::vector<Vec>& generators() const { return *generators_; }

  /// Cone membership within tol (scaled by |v|). Uses halfspace rows when
  /// present, otherwise an NNLS feasibility solve on the generators.
  bool contains(const Vec& v, double tol = 1e-9) const;

  /// Consistency check: 0 in cone, closure under nonnegative scaling on
  /// random samples, and mutual membership when both forms are present.
  void validate(std::mt19937_64& rng, int samples = 100) const;

private:
  int dim_ = 0;
  std::optional<Mat> halfspaces_;
  std::optional<std::vector<Vec>> generators_;
};

} // namespace pds
