#include "pds/metric.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

namespace pds {

MetricField MetricField::euclidean() { return MetricField(); }

MetricField MetricField::constant(Mat G) {
  return MetricField([G = std::move(G)](const Vec&) { return G; });
}

Mat MetricField::matrix(const Vec& x) const {
  if (!eval_) return Mat::Identity(x.size(), x.size());
  Mat G = eval_(x);
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DefinitenessError("metric matrix not symmetric at queried point");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
  const double floor = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() <= floor) {
    std::ostringstream oss;
    oss << "metric matrix not positive definite: min eigenvalue "
        << es.eigenvalues().minCoeff();
    throw DefinitenessError(oss.str());
  }
  return G;
}

double MetricField::inner(const Vec& x, const Vec& u, const Vec& v) const {
  if (!eval_) return u.dot(v);
  return u.dot(matrix(x) * v);
}

double MetricField::norm(const Vec& x, const Vec& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

MetricDiagnostics MetricField::diagnostics(const Vec& x) const {
  MetricDiagnostics d;
  if (!eval_) return d;
  Eigen::SelfAdjointEigenSolver<Mat> es(matrix(x), Eigen::EigenvaluesOnly);
  d.lambda_min = es.eigenvalues().minCoeff();
  d.lambda_max = es.eigenvalues().maxCoeff();
  d.kappa = d.lambda_max / d.lambda_min;
  return d;
}

} // namespace pds
