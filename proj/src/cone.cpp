#include "pds/cone.hpp"

#include "pds/nnls.hpp"

#include <cmath>
#include <stdexcept>

namespace pds {

PolyhedralCone PolyhedralCone::from_halfspaces(Mat A) {
  PolyhedralCone c;
  c.dim_ = static_cast<int>(A.cols());
  c.halfspaces_ = std::move(A);
  return c;
}

PolyhedralCone PolyhedralCone::from_generators(std::vector<Vec> gens) {
  if (gens.empty()) throw std::invalid_argument("generator form needs at least one vector");
  PolyhedralCone c;
  c.dim_ = static_cast<int>(gens.front().size());
  c.generators_ = std::move(gens);
  return c;
}

PolyhedralCone PolyhedralCone::from_both(Mat A, std::vector<Vec> gens) {
  PolyhedralCone c = from_halfspaces(std::move(A));
  c.generators_ = std::move(gens);
  return c;
}

PolyhedralCone PolyhedralCone::full(int n) {
  PolyhedralCone c;
  c.dim_ = n;
  c.halfspaces_ = Mat::Zero(0, n);
  return c;
}

PolyhedralCone PolyhedralCone::zero(int n) {
  PolyhedralCone c;
  c.dim_ = n;
  c.generators_ = std::vector<Vec>{};
  return c;
}

bool PolyhedralCone::is_full() const {
  return has_halfspaces() && halfspaces_->rows() == 0;
}

bool PolyhedralCone::contains(const Vec& v, double tol) const {
  const double scale = 1.0 + v.norm();
  if (has_halfspaces()) {
    if (halfspaces_->rows() == 0) return true;
    return ((*halfspaces_) * v).maxCoeff() <= tol * scale;
  }
  if (generators_->empty()) return v.norm() <= tol * scale;
  Mat I = Mat::Identity(dim_, dim_);
  NnlsResult r = nnls_project(*generators_, I, v);
  return std::sqrt(std::max(0.0, r.residual_sq)) <= tol * scale;
}

void PolyhedralCone::validate(std::mt19937_64& rng, int samples) const {
  if (!contains(Vec::Zero(dim_), 1e-12)) {
    throw std::logic_error("polyhedral cone does not contain the zero vector");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat I = Mat::Identity(dim_, dim_);
  for (int s = 0; s < samples; ++s) {
    Vec raw(dim_);
    for (int i = 0; i < dim_; ++i) raw[i] = gauss(rng);
    // Sample an element of the cone: generator combination if available,
    // otherwise projection of a random vector onto the halfspace form.
    Vec v;
    if (has_generators()) {
      v = Vec::Zero(dim_);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (const Vec& g : *generators_) v += unif(rng) * g;
    } else if (halfspaces_->rows() == 0) {
      v = raw;
    } else {
      // Polar generators of {Av <= 0} under the Euclidean metric are the rows
      // of A; Moreau: v = raw - proj_polar(raw).
      std::vector<Vec> polar;
      for (int r = 0; r < halfspaces_->rows(); ++r) polar.push_back(halfspaces_->row(r).transpose());
      v = raw - nnls_project(polar, I, raw).point;
    }
    if (!contains(v, 1e-8) || !contains(2.0 * v, 1e-8) || !contains(0.5 * v, 1e-8)) {
      throw std::logic_error("polyhedral cone not closed under nonnegative scaling");
    }
    if (has_halfspaces() && has_generators()) {
      // Mutual consistency: sampled members of each form belong to the other.
      Vec w = raw - nnls_project(
                        [&] {
                          std::vector<Vec> polar;
                          for (int r = 0; r < halfspaces_->rows(); ++r)
                            polar.push_back(halfspaces_->row(r).transpose());
                          return polar;
                        }(),
                        I, raw)
                        .point;
      Mat In = Mat::Identity(dim_, dim_);
      if (std::sqrt(nnls_project(*generators_, In, w).residual_sq) > 1e-7 * (1.0 + w.norm())) {
        throw std::logic_error("halfspace and generator forms describe different cones");
      }
      if (halfspaces_->rows() > 0) {
        for (const Vec& g : *generators_) {
          if (((*halfspaces_) * g).maxCoeff() > 1e-9 * (1.0 + g.norm())) {
            throw std::logic_error("generator violates halfspace form");
          }
        }
      }
    }
  }
}

} // namespace pds
