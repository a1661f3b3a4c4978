#include "pds/fields.hpp"

#include <cmath>
#include <memory>
#include <limits>

namespace pds {

double fd_step(double coordinate) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * (1.0 + std::abs(coordinate));
}

VectorField VectorField::constant(Vec v) {
  return VectorField([v = std::move(v)](const Vec&) { return v; }, "constant");
}

VectorField VectorField::linear(Mat A) {
  return VectorField([A = std::move(A)](const Vec& x) -> Vec { return A * x; }, "linear");
}

VectorField VectorField::zero(int n) {
  return VectorField([n](const Vec&) { return Vec::Zero(n); }, "zero");
}

Vec ScalarField::gradient(const Vec& x) const {
  if (gradient_) return gradient_(x);
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (value_(xp) - value_(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

Mat ScalarField::hessian(const Vec& x) const {
  if (hessian_) return hessian_(x);
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  if (gradient_) {
    // Forward differences of the gradient, symmetrized. Preferred over
    // second-order differences of the value, which are too noisy for
    // definiteness checks.
    const Vec g0 = gradient_(x);
    Vec xp = x;
    for (int j = 0; j < n; ++j) {
      const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x[j]));
      xp[j] = x[j] + h;
      H.col(j) = (gradient_(xp) - g0) / h;
      xp[j] = x[j];
    }
    return 0.5 * (H + H.transpose());
  }
  // Value-only fallback: central second differences at the quarter-root step.
  static const double base = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  const double f0 = value_(x);
  Vec xq = x;
  for (int i = 0; i < n; ++i) {
    const double hi = base * (1.0 + std::abs(x[i]));
    xq[i] = x[i] + hi;
    const double fp = value_(xq);
    xq[i] = x[i] - hi;
    const double fm = value_(xq);
    xq[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (int j = i + 1; j < n; ++j) {
      const double hj = base * (1.0 + std::abs(x[j]));
      xq[i] = x[i] + hi;
      xq[j] = x[j] + hj;
      const double fpp = value_(xq);
      xq[j] = x[j] - hj;
      const double fpm = value_(xq);
      xq[i] = x[i] - hi;
      const double fmm = value_(xq);
      xq[j] = x[j] + hj;
      const double fmp = value_(xq);
      xq[i] = x[i];
      xq[j] = x[j];
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return H;
}

ScalarField ScalarField::quadratic(Mat Q, Vec center, std::string name) {
  auto Qp = std::make_shared<Mat>(std::move(Q));
  auto cp = std::make_shared<Vec>(std::move(center));
  return ScalarField(
      [Qp, cp](const Vec& x) {
        Vec d = x - *cp;
        return 0.5 * d.dot(*Qp * d);
      },
      [Qp, cp](const Vec& x) -> Vec { return *Qp * (x - *cp); },
      [Qp](const Vec&) { return *Qp; }, std::move(name));
}

} // namespace pds
