#include "pds/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace pds {

namespace {

// ---------------------------------------------------------------------------
// Marble run: segments x2 = +-2 x1 - c_j, |x2| <= |x1|, c_j = 2 * 3^-j.
// Right segment j runs from the bottom (c_j/3, -c_j/3) to the top (c_j, c_j);
// the left segment mirrors it. Tops are isolated points of the set.
// ---------------------------------------------------------------------------

double seg_scale(int j) { return 2.0 * std::pow(3.0, -j); }

int scale_index(double c) { return static_cast<int>(std::floor(std::log(2.0 / c) / std::log(3.0))); }

struct SegmentRef {
  int side; // +1 right, -1 left
  int j;
};

Vec seg_bottom(const SegmentRef& s) {
  const double c = seg_scale(s.j);
  Vec p(2);
  p << s.side * c / 3.0, -c / 3.0;
  return p;
}

Vec seg_top(const SegmentRef& s) {
  const double c = seg_scale(s.j);
  Vec p(2);
  p << s.side * c, c;
  return p;
}

constexpr int kMarbleWindow = 28; // 3^28 covers the usable double range

std::vector<SegmentRef> segments_near(double norm_scale, double radius) {
  std::vector<SegmentRef> out;
  const double hi = 3.0 * (norm_scale + radius) / std::sqrt(2.0);
  if (hi <= 0.0) return out;
  int jlo = scale_index(hi) - 1;
  for (int j = jlo; j < jlo + kMarbleWindow; ++j) {
    if (seg_scale(j) < 1e-300) break;
    out.push_back({+1, j});
    out.push_back({-1, j});
  }
  return out;
}

Vec project_to_segment(const Vec& y, const SegmentRef& s) {
  const Vec b = seg_bottom(s);
  const Vec t = seg_top(s);
  const Vec d = t - b;
  const double u = std::clamp((y - b).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return b + u * d;
}

enum class MarblePos { bottom, interior, top };

struct MarbleHit {
  SegmentRef seg;
  MarblePos pos;
};

std::optional<MarbleHit> marble_classify(const Vec& x) {
  const double ax = std::abs(x[0]);
  if (ax < 1e-300) return std::nullopt;
  const int side = x[0] > 0 ? +1 : -1;
  const double tol = 1e-9 * (1.0 + x.norm());
  const int jc = scale_index(ax);
  for (int j = jc - 2; j <= jc + 2; ++j) {
    const double c = seg_scale(j);
    if (ax < c / 3.0 - tol || ax > c + tol) continue;
    if (std::abs(x[1] - (2.0 * ax - c)) > tol) continue;
    MarbleHit hit;
    hit.seg = {side, j};
    const double end_tol = 1e-9 * c;
    if (ax <= c / 3.0 + end_tol) {
      hit.pos = MarblePos::bottom;
    } else if (ax >= c - end_tol) {
      hit.pos = MarblePos::top;
    } else {
      hit.pos = MarblePos::interior;
    }
    return hit;
  }
  return std::nullopt;
}

bool marble_member(const Vec& x) {
  if (x.norm() <= 1e-13) return true;
  return marble_classify(x).has_value();
}

std::vector<PolyhedralCone> marble_branches(const Vec& x) {
  if (x.norm() <= 1e-13) {
    Mat right(2, 2), left(2, 2);
    right << -1, 1, -1, -1; // v1 >= |v2|
    left << 1, 1, 1, -1;    // -v1 >= |v2|
    return {PolyhedralCone::from_halfspaces(right), PolyhedralCone::from_halfspaces(left)};
  }
  const auto hit = marble_classify(x);
  if (!hit) throw InfeasiblePointError(-1, x.norm());
  const Vec dir = (seg_top(hit->seg) - seg_bottom(hit->seg)).normalized();
  switch (hit->pos) {
    case MarblePos::interior: {
      Mat rows(2, 2);
      rows << -dir[1], dir[0], dir[1], -dir[0]; // the line through dir
      return {PolyhedralCone::from_halfspaces(rows)};
    }
    case MarblePos::top:
      return {PolyhedralCone::from_generators({Vec(-dir)})};
    case MarblePos::bottom:
      return {PolyhedralCone::from_generators({Vec(dir)})};
  }
  throw std::logic_error("unreachable");
}

std::vector<Vec> marble_sampler(const Vec& x, double radius, int count, std::mt19937_64& rng) {
  std::vector<Vec> out;
  if (x.norm() <= radius) out.push_back(Vec::Zero(2));
  const auto segs = segments_near(x.norm(), radius);
  for (const auto& s : segs) {
    for (const Vec& p : {seg_bottom(s), seg_top(s)}) {
      if ((p - x).norm() <= radius) out.push_back(p);
    }
    if (static_cast<int>(out.size()) >= count) break;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick(0, segs.empty() ? 0 : segs.size() - 1);
  for (int attempt = 0; attempt < 30 * count && static_cast<int>(out.size()) < count; ++attempt) {
    if (segs.empty()) break;
    const auto& s = segs[pick(rng)];
    const Vec p = seg_bottom(s) + unif(rng) * (seg_top(s) - seg_bottom(s));
    if ((p - x).norm() <= radius) out.push_back(p);
  }
  return out;
}

Vec marble_project(const Vec& y) {
  const double n = y.norm();
  if (n <= 1e-300) return Vec::Zero(2);
  Vec best = Vec::Zero(2);
  double best_d = n;
  for (const auto& s : segments_near(n, 0.0)) {
    const Vec cand = project_to_segment(y, s);
    const double d = (cand - y).norm();
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  return best;
}

std::vector<int> marble_active(const Vec& x) {
  if (x.norm() <= 1e-13) return {1};
  const auto hit = marble_classify(x);
  if (!hit) return {};
  return {2 * (hit->seg.j + 64) + (hit->seg.side > 0 ? 0 : 1)};
}

// ---------------------------------------------------------------------------
// X_alpha = {(x1,x2) | |x2| >= max(0,x1)^alpha}
// ---------------------------------------------------------------------------

struct XAlpha {
  double alpha;
  double band = 1e-5;   // on-curve classification band
  double origin_tol = 1e-12;

  enum class Region { origin, upper, lower, interior, infeasible };

  Region classify(const Vec& x) const {
    if (x.norm() <= origin_tol) return Region::origin;
    if (x[0] <= 0.0) return Region::interior;
    const double curve = std::pow(x[0], alpha);
    const double tol = band * (1.0 + std::abs(x[1]));
    if (std::abs(x[1] - curve) <= tol) return Region::upper;
    if (std::abs(x[1] + curve) <= tol) return Region::lower;
    if (std::abs(x[1]) > curve) return Region::interior;
    return Region::infeasible;
  }

  bool member(const Vec& x) const { return classify(x) != Region::infeasible; }

  std::vector<PolyhedralCone> branches(const Vec& x) const {
    switch (classify(x)) {
      case Region::origin: {
        Mat rows(1, 2);
        rows << 1, 0; // v1 <= 0
        return {PolyhedralCone::from_halfspaces(rows)};
      }
      case Region::upper: {
        Mat rows(1, 2);
        rows << alpha * std::pow(x[0], alpha - 1.0), -1.0;
        return {PolyhedralCone::from_halfspaces(rows)};
      }
      case Region::lower: {
        Mat rows(1, 2);
        rows << alpha * std::pow(x[0], alpha - 1.0), 1.0;
        return {PolyhedralCone::from_halfspaces(rows)};
      }
      case Region::interior:
        return {PolyhedralCone::full(2)};
      case Region::infeasible:
        break;
    }
    throw InfeasiblePointError(0, std::pow(x[0], alpha) - std::abs(x[1]));
  }

  Vec curve_point(double s, int sign) const {
    Vec p(2);
    p << s, sign * std::pow(s, alpha);
    return p;
  }

  // Largest s with |(s, s^alpha) - x| <= radius (0 when none).
  double max_param(const Vec& x, double radius, int sign) const {
    auto dist = [&](double s) { return (curve_point(s, sign) - x).norm(); };
    double hi = std::max(x.norm() + radius, 1e-9);
    hi = std::max(hi, std::pow(hi, 1.0 / alpha));
    if (dist(hi) <= radius) return hi;
    double lo = 0.0;
    if (dist(lo) > radius) {
      // Scan for any admissible parameter first.
      bool found = false;
      for (int k = 0; k < 256; ++k) {
        const double s = hi * std::pow(10.0, -12.0 * (255 - k) / 255.0);
        if (dist(s) <= radius) {
          lo = s;
          found = true;
          break;
        }
      }
      if (!found) return 0.0;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dist(mid) <= radius ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<Vec> sample(const Vec& x, double radius, int count, std::mt19937_64& rng) const {
    std::vector<Vec> out;
    if (x.norm() <= radius) out.push_back(Vec::Zero(2));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double smax_up = max_param(x, radius, +1);
    const double smax_dn = max_param(x, radius, -1);
    for (int attempt = 0; attempt < 20 * count && static_cast<int>(out.size()) < count;
         ++attempt) {
      const int sign = (attempt % 2 == 0) ? +1 : -1;
      const double smax = sign > 0 ? smax_up : smax_dn;
      if (smax <= 0.0) continue;
      // Log-uniform over three decades below the largest admissible parameter.
      const double s = smax * std::pow(10.0, -3.0 * unif(rng));
      const Vec p = curve_point(s, sign);
      if ((p - x).norm() <= radius) out.push_back(p);
    }
    return out;
  }

  Vec project(const Vec& y) const {
    if (member(y)) {
      // Snap near-curve points exactly onto the curve.
      const Region r = classify(y);
      if (r == Region::upper || r == Region::lower) {
        return nearest_on_curve(y, r == Region::upper ? +1 : -1);
      }
      return y;
    }
    const int sign = y[1] >= 0.0 ? +1 : -1;
    return nearest_on_curve(y, sign);
  }

  Vec nearest_on_curve(const Vec& y, int sign) const {
    const double b = std::abs(y[1]);
    auto dsq = [&](double u) {
      const double du = u - y[0];
      const double dv = std::pow(u, alpha) - b;
      return du * du + dv * dv;
    };
    // Coarse scan then golden-section refinement.
    const double hi = std::max(y[0], 1e-30);
    double best_u = 0.0;
    double best = dsq(0.0);
    for (int k = 0; k <= 128; ++k) {
      const double u = hi * k / 128.0;
      const double d = dsq(u);
      if (d < best) {
        best = d;
        best_u = u;
      }
    }
    double lo = std::max(0.0, best_u - hi / 128.0);
    double up = std::min(hi, best_u + hi / 128.0);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = up - gr * (up - lo), d = lo + gr * (up - lo);
    for (int it = 0; it < 160; ++it) {
      if (dsq(c) < dsq(d)) {
        up = d;
      } else {
        lo = c;
      }
      c = up - gr * (up - lo);
      d = lo + gr * (up - lo);
    }
    const double u = 0.5 * (lo + up);
    if (dsq(0.0) <= dsq(u)) return Vec::Zero(2);
    Vec p(2);
    p << u, sign * std::pow(u, alpha);
    return p;
  }

  std::vector<int> active(const Vec& x) const {
    switch (classify(x)) {
      case Region::origin: return {0, 1};
      case Region::upper: return {0};
      case Region::lower: return {1};
      default: return {};
    }
  }
};

} // namespace

std::shared_ptr<OracleSet> make_marble_run() {
  return std::make_shared<OracleSet>(
      2, marble_member, marble_branches, marble_sampler, marble_project, nullptr, marble_active);
}

Vec marble_run_top(int k) {
  Vec p(2);
  const double v = 2.0 * std::pow(3.0, -(1 + 2 * k));
  p << v, v;
  return p;
}

std::shared_ptr<OracleSet> make_x_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("x-alpha parameter must lie in (0, 1)");
  }
  auto xa = std::make_shared<XAlpha>();
  xa->alpha = alpha;
  return std::make_shared<OracleSet>(
      2, [xa](const Vec& x) { return xa->member(x); },
      [xa](const Vec& x) { return xa->branches(x); },
      [xa](const Vec& x, double r, int c, std::mt19937_64& rng) { return xa->sample(x, r, c, rng); },
      [xa](const Vec& y) { return xa->project(y); }, nullptr,
      [xa](const Vec& x) { return xa->active(x); });
}

} // namespace pds
