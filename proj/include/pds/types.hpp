#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace pds {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point violates the feasible-set membership test.
class InfeasiblePointError : public std::runtime_error {
public:
  InfeasiblePointError(int index, double value)
      : std::runtime_error("infeasible point: constraint " + std::to_string(index) +
                           " violated by " + std::to_string(value)),
        index(index), value(value) {}
  int index;
  double value;
};

/// Active constraint Jacobian is rank deficient (constraint qualification fails).
class DegenerateRankError : public std::runtime_error {
public:
  explicit DegenerateRankError(const std::string& what) : std::runtime_error(what) {}
};

/// A metric evaluation is not symmetric positive definite.
class DefinitenessError : public std::runtime_error {
public:
  explicit DefinitenessError(const std::string& what) : std::runtime_error(what) {}
};

/// Feasibility restoration did not converge; carries the last iterate.
class RestorationError : public std::runtime_error {
public:
  RestorationError(const std::string& what, Vec last_iterate, double residual)
      : std::runtime_error(what), last_iterate(std::move(last_iterate)), residual(residual) {}
  Vec last_iterate;
  double residual;
};

/// The cone-projection solver exceeded its iteration cap.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A neighborhood sampler produced no usable points.
class SamplerError : public std::runtime_error {
public:
  explicit SamplerError(const std::string& what) : std::runtime_error(what) {}
};

/// A multi-branch (irregular) projection was hit where a single branch is required.
class IrregularityError : public std::runtime_error {
public:
  explicit IrregularityError(const std::string& what) : std::runtime_error(what) {}
};

/// A trajectory left the domain of a coordinate chart.
class ChartDomainError : public std::runtime_error {
public:
  ChartDomainError(const std::string& what, double exit_time)
      : std::runtime_error(what), exit_time(exit_time) {}
  double exit_time;
};

} // namespace pds
