#pragma once

#include "pds/types.hpp"

#include <functional>
#include <optional>

namespace pds {

struct MetricDiagnostics {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa = 1.0;
};

/// A variable Riemannian metric x -> G(x), G symmetric positive definite.
///
/// Every evaluation is validated: symmetry within 1e-12 of scale and strictly
/// positive eigenvalues, otherwise DefinitenessError. Evaluations are lazy,
/// per point, with no caching.
class MetricField {
public:
  MetricField() = default;
  MetricField(std::function<Mat(const Vec&)> eval, std::optional<double> lipschitz_hint = {})
      : eval_(std::move(eval)), lipschitz_hint_(lipschitz_hint) {}

  static MetricField euclidean();
  static MetricField constant(Mat G);

  /// Validated metric matrix at x.
  Mat matrix(const Vec& x) const;

  double inner(const Vec& x, const Vec& u, const Vec& v) const;
  double norm(const Vec& x, const Vec& v) const;

  /// Eigenvalue bounds and condition number of G(x).
  MetricDiagnostics diagnostics(const Vec& x) const;

  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }
  bool is_euclidean() const { return !eval_; }

private:
  std::function<Mat(const Vec&)> eval_; // empty means Euclidean
  std::optional<double> lipschitz_hint_;
};

} // namespace pds
