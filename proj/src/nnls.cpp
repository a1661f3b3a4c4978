#include "pds/nnls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pds {

namespace {

// Least-squares weights for the passive columns of the whitened generator
// matrix. QR keeps the conditioning at the square root of the Gram
// matrix's, which matters under ill-conditioned metrics.
Vec solve_passive(const Mat& C, const Vec& target, const std::vector<int>& passive) {
  const int k = static_cast<int>(passive.size());
  Mat Cp(C.rows(), k);
  for (int c = 0; c < k; ++c) Cp.col(c) = C.col(passive[c]);
  return Cp.colPivHouseholderQr().solve(target);
}

} // namespace

NnlsResult nnls_project(const std::vector<Vec>& generators, const Mat& G,
                        const Vec& target, int max_iter) {
  const int m = static_cast<int>(generators.size());
  const int n = static_cast<int>(target.size());
  NnlsResult result;
  result.coeffs = Vec::Zero(m);
  result.point = Vec::Zero(n);
  result.iterations = 0;
  if (m == 0) {
    result.residual_sq = target.dot(G * target);
    return result;
  }
  if (max_iter < 0) max_iter = 50 * m;

  // Whiten by G = L L': the G-inner-product problem becomes Euclidean in
  // C = L' [generators], t = L' target.
  Eigen::LLT<Mat> llt(G);
  const Mat Lt = Mat(llt.matrixL()).transpose();
  Mat C(n, m);
  for (int i = 0; i < m; ++i) C.col(i) = Lt * generators[i];
  const Vec t = Lt * target;

  const Vec b = C.transpose() * t;
  const double w_tol = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());
  Vec alpha = Vec::Zero(m);
  std::vector<bool> in_passive(m, false);
  std::vector<int> passive;

  int iter = 0;
  while (true) {
    const Vec w = C.transpose() * (t - C * alpha);
    int enter = -1;
    double best = w_tol;
    for (int i = 0; i < m; ++i) {
      if (!in_passive[i] && w[i] > best) {
        best = w[i];
        enter = i;
      }
    }
    if (enter < 0) break;
    in_passive[enter] = true;
    passive.push_back(enter);

    while (true) {
      if (++iter > max_iter) {
        std::ostringstream oss;
        oss << "nnls_project: no convergence after " << iter << " pivots; alpha = [";
        for (int i = 0; i < m; ++i) oss << alpha[i] << (i + 1 < m ? ", " : "]");
        throw SolverError(oss.str());
      }
      Vec z = solve_passive(C, t, passive);
      double zmin = z.minCoeff();
      if (zmin > 0.0) {
        for (size_t r = 0; r < passive.size(); ++r) alpha[passive[r]] = z[r];
        break;
      }
      // Inner step: back off along alpha -> z until a coefficient hits zero.
      double step = 1.0;
      for (size_t r = 0; r < passive.size(); ++r) {
        if (z[r] <= 0.0) {
          double a = alpha[passive[r]];
          if (a - z[r] > 0.0) step = std::min(step, a / (a - z[r]));
        }
      }
      for (size_t r = 0; r < passive.size(); ++r) {
        int i = passive[r];
        alpha[i] += step * (z[r] - alpha[i]);
      }
      std::vector<int> kept;
      for (int i : passive) {
        if (alpha[i] > 1e-14) {
          kept.push_back(i);
        } else {
          alpha[i] = 0.0;
          in_passive[i] = false;
        }
      }
      passive = kept;
      if (passive.empty()) break;
    }
  }

  result.coeffs = alpha;
  for (int i = 0; i < m; ++i)
    if (alpha[i] != 0.0) result.point += alpha[i] * generators[i];
  Vec diff = target - result.point;
  result.residual_sq = diff.dot(G * diff);
  result.iterations = iter;
  return result;
}

double convex_hull_distance_sq(const std::vector<Vec>& points, const Vec& p) {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(p.size());
  double scale = 1.0;
  for (const Vec& q : points) scale = std::max(scale, (q - p).norm());
  const double rho = 1e3 * scale;

  // Homogenized NNLS enforces the unit-sum constraint via a stiff extra row.
  std::vector<Vec> lifted;
  lifted.reserve(points.size());
  for (const Vec& q : points) {
    Vec c(n + 1);
    c.head(n) = q - p;
    c[n] = rho;
    lifted.push_back(std::move(c));
  }
  Vec target = Vec::Zero(n + 1);
  target[n] = rho;
  Mat G = Mat::Identity(n + 1, n + 1);
  NnlsResult r = nnls_project(lifted, G, target);
  return (r.point.head(n)).squaredNorm();
}

bool in_convex_hull(const std::vector<Vec>& points, const Vec& p, double tol) {
  return std::sqrt(convex_hull_distance_sq(points, p)) <= tol;
}

} // namespace pds
