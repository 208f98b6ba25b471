#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "irig/rng.hpp"
#include "irig/vectors.hpp"

namespace irig {

// Compact convex feasible set with cheap Euclidean projection. Two families
// ship: axis-aligned boxes and Euclidean balls.
class feasible_set {
 public:
  enum class kind { box, ball2 };

  static feasible_set box(dense_vector lower, dense_vector upper) {
    require_same_dim(lower.size(), upper.size(), "feasible_set::box");
    if (lower.size() == 0)
      throw std::invalid_argument("feasible_set::box: empty dimension");
    for (std::size_t j = 0; j < lower.size(); ++j)
      if (lower[j] > upper[j])
        throw std::invalid_argument("feasible_set::box: lower > upper");
    feasible_set s;
    s.kind_ = kind::box;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
  }

  // symmetric box [-h, h]^n
  static feasible_set centered_box(std::size_t n, double halfwidth) {
    if (!(halfwidth >= 0.0) || !std::isfinite(halfwidth))
      throw std::invalid_argument("feasible_set::centered_box: bad halfwidth");
    return box(dense_vector(n, -halfwidth), dense_vector(n, halfwidth));
  }

  static feasible_set ball(dense_vector center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("feasible_set::ball: radius must be > 0");
    if (center.size() == 0)
      throw std::invalid_argument("feasible_set::ball: empty dimension");
    feasible_set s;
    s.kind_ = kind::ball2;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }

  kind set_kind() const { return kind_; }
  std::size_t dimension() const {
    return kind_ == kind::box ? lower_.size() : center_.size();
  }
  const dense_vector &lower() const { return lower_; }
  const dense_vector &upper() const { return upper_; }
  const dense_vector &center() const { return center_; }
  double radius() const { return radius_; }

  // argmin_{z in X} ||z - x||_2
  dense_vector project(const dense_vector &x) const {
    require_same_dim(dimension(), x.size(), "feasible_set::project");
    if (kind_ == kind::box) {
      std::vector<double> out(x.size());
      for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = std::min(std::max(x[j], lower_[j]), upper_[j]);
      return dense_vector(std::move(out));
    }
    dense_vector p = x;
    // Rescaling may land a few ulps outside; repeat until p is a fixed point
    // so that project(project(x)) == project(x) holds exactly.
    for (int pass = 0; pass < 8; ++pass) {
      const double dist = distance(p, center_);
      if (dist <= radius_) return p;
      double scale = radius_ / dist;
      if (pass == 7) scale *= 1.0 - 8.0 * std::numeric_limits<double>::epsilon();
      std::vector<double> out(p.size());
      for (std::size_t j = 0; j < p.size(); ++j)
        out[j] = center_[j] + scale * (p[j] - center_[j]);
      p = dense_vector(std::move(out));
    }
    return p;
  }

  bool contains(const dense_vector &x, double tol) const {
    require_same_dim(dimension(), x.size(), "feasible_set::contains");
    if (tol < 0.0) throw std::invalid_argument("feasible_set::contains: tol < 0");
    if (kind_ == kind::box) {
      for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] < lower_[j] - tol || x[j] > upper_[j] + tol) return false;
      return true;
    }
    return distance(x, center_) <= radius_ + tol;
  }

  // Tight bound on sup_{x in X} ||x||.
  double radius_bound() const {
    if (kind_ == kind::box) {
      double sq = 0.0;
      for (std::size_t j = 0; j < lower_.size(); ++j)
        sq += std::max(lower_[j] * lower_[j], upper_[j] * upper_[j]);
      return std::sqrt(sq);
    }
    return norm2(center_) + radius_;
  }

  // Uniform-ish draw from the set (coordinatewise for boxes; radial for balls,
  // with every fourth draw pushed to the boundary sphere).
  dense_vector sample(rng &gen) const {
    const std::size_t n = dimension();
    std::vector<double> out(n);
    if (kind_ == kind::box) {
      for (std::size_t j = 0; j < n; ++j)
        out[j] = gen.uniform(lower_[j], upper_[j]);
      return dense_vector(std::move(out));
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = gen.normal();
      sq += out[j] * out[j];
    }
    const double nrm = std::sqrt(sq);
    double rad = radius_;
    if (gen.below(4) != 0)
      rad *= std::pow(gen.uniform(), 1.0 / static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j)
      out[j] = center_[j] + (nrm > 0.0 ? rad * out[j] / nrm : 0.0);
    dense_vector p(std::move(out));
    return contains(p, 0.0) ? p : project(p);
  }

  // Deterministic extreme points: all box vertices when 2^n is small, the
  // center and axis endpoints for balls. Suprema of subgradient norms over
  // these families are attained here, which makes sampled constant estimates
  // exact on small instances.
  std::vector<dense_vector> extreme_points(std::size_t max_vertex_dim = 12) const {
    std::vector<dense_vector> pts;
    const std::size_t n = dimension();
    if (kind_ == kind::box) {
      if (n <= max_vertex_dim) {
        const std::size_t count = std::size_t{1} << n;
        for (std::size_t mask = 0; mask < count; ++mask) {
          std::vector<double> v(n);
          for (std::size_t j = 0; j < n; ++j)
            v[j] = (mask >> j) & 1 ? upper_[j] : lower_[j];
          pts.emplace_back(std::move(v));
        }
      }
      return pts;
    }
    pts.push_back(center_);
    for (std::size_t j = 0; j < n; ++j) {
      dense_vector lo = center_, hi = center_;
      lo[j] -= radius_;
      hi[j] += radius_;
      pts.push_back(std::move(lo));
      pts.push_back(std::move(hi));
    }
    return pts;
  }

 private:
  feasible_set() = default;

  kind kind_ = kind::box;
  dense_vector lower_, upper_;   // box
  dense_vector center_;          // ball2
  double radius_ = 0.0;          // ball2
};

}  // namespace irig
