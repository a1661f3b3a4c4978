#pragma once

#include "pds/metric.hpp"
#include "pds/types.hpp"

#include <functional>
#include <string>

namespace pds {

/// Central-difference step size: cbrt(eps) * (1 + |coordinate|).
double fd_step(double coordinate);

class VectorField {
public:
  VectorField() = default;
  explicit VectorField(std::function<Vec(const Vec&)> f, std::string name = "")
      : f_(std::move(f)), name_(std::move(name)) {}

  Vec operator()(const Vec& x) const { return f_(x); }
  bool valid() const { return static_cast<bool>(f_); }
  const std::string& name() const { return name_; }

  static VectorField constant(Vec v);
  static VectorField linear(Mat A);
  static VectorField zero(int n);

private:
  std::function<Vec(const Vec&)> f_;
  std::string name_;
};

/// Scalar potential with optional analytic gradient/Hessian.
///
/// Missing derivatives fall back to central differences of the value and
/// symmetrized forward differences of the gradient respectively.
class ScalarField {
public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  ScalarField() = default;
  ScalarField(ValueFn value, GradFn gradient = nullptr, HessFn hessian = nullptr,
              std::string name = "")
      : value_(std::move(value)), gradient_(std::move(gradient)),
        hessian_(std::move(hessian)), name_(std::move(name)) {}

  double value(const Vec& x) const { return value_(x); }
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  bool valid() const { return static_cast<bool>(value_); }
  const std::string& name() const { return name_; }

  /// 1/2 (x-c)' Q (x-c) with analytic derivatives.
  static ScalarField quadratic(Mat Q, Vec center, std::string name = "quadratic");

private:
  ValueFn value_;
  GradFn gradient_;
  HessFn hessian_;
  std::string name_;
};

} // namespace pds
