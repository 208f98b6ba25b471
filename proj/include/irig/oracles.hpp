#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irig/geometry.hpp"
#include "irig/rng.hpp"
#include "irig/vectors.hpp"

namespace irig {

// Value-and-subgradient contract for a convex function. Oracles are pure and
// stateless after construction; subgradient selection at kinks is
// deterministic (see the concrete types below).
class component_oracle {
 public:
  virtual ~component_oracle() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(const dense_vector &x) const = 0;
  virtual dense_vector subgradient(const dense_vector &x) const = 0;
};

// Strongly convex upper-level objective with modulus mu().
class upper_oracle : public component_oracle {
 public:
  virtual double mu() const = 0;
};

inline double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// sum_j max{0, 1 - b_j <x, a_j>} over a nonempty batch of labeled sparse
// samples. At margin exactly 1 the zero element of the subdifferential is
// selected.
class hinge_batch : public component_oracle {
 public:
  struct sample {
    sparse_vector a;
    int label;  // +1 or -1
  };

  hinge_batch(std::size_t dim, std::vector<sample> samples)
      : dim_(dim), samples_(std::move(samples)) {
    if (samples_.empty())
      throw std::invalid_argument("hinge_batch: batch must be nonempty");
    for (const auto &s : samples_) {
      if (s.label != 1 && s.label != -1)
        throw std::invalid_argument("hinge_batch: labels must be +1 or -1");
      require_same_dim(s.a.dimension(), dim_, "hinge_batch");
    }
  }

  std::size_t dimension() const override { return dim_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<sample> &samples() const { return samples_; }

  double value(const dense_vector &x) const override {
    require_same_dim(dim_, x.size(), "hinge_batch::value");
    double total = 0.0;
    for (const auto &s : samples_) {
      const double margin = s.label * dot(s.a, x);
      if (margin < 1.0) total += 1.0 - margin;
    }
    return total;
  }

  dense_vector subgradient(const dense_vector &x) const override {
    require_same_dim(dim_, x.size(), "hinge_batch::subgradient");
    std::vector<double> g(dim_, 0.0);
    for (const auto &s : samples_) {
      const double margin = s.label * dot(s.a, x);
      if (margin < 1.0) {
        const auto &idx = s.a.indices();
        const auto &val = s.a.values();
        for (std::size_t t = 0; t < idx.size(); ++t)
          g[idx[t]] -= s.label * val[t];
      }
    }
    return dense_vector(std::move(g));
  }

 private:
  std::size_t dim_;
  std::vector<sample> samples_;
};

// max{0, q(x)} for a convex q; the exact-penalty reformulation of the
// constraint q(x) <= 0. On the boundary q(x) = 0 the zero subgradient is
// selected.
class constraint_penalty : public component_oracle {
 public:
  explicit constraint_penalty(std::shared_ptr<const component_oracle> q)
      : q_(std::move(q)) {
    if (!q_) throw std::invalid_argument("constraint_penalty: null q");
  }

  std::size_t dimension() const override { return q_->dimension(); }
  const component_oracle &q() const { return *q_; }

  double value(const dense_vector &x) const override {
    return std::max(0.0, q_->value(x));
  }

  dense_vector subgradient(const dense_vector &x) const override {
    if (q_->value(x) > 0.0) return q_->subgradient(x);
    return dense_vector(x.size(), 0.0);
  }

 private:
  std::shared_ptr<const component_oracle> q_;
};

// <c, x> - d
class affine_function : public component_oracle {
 public:
  affine_function(dense_vector c, double d) : c_(std::move(c)), d_(d) {}

  std::size_t dimension() const override { return c_.size(); }
  const dense_vector &coefficients() const { return c_; }
  double offset() const { return d_; }

  double value(const dense_vector &x) const override { return dot(c_, x) - d_; }
  dense_vector subgradient(const dense_vector &x) const override {
    require_same_dim(c_.size(), x.size(), "affine_function::subgradient");
    return c_;
  }

 private:
  dense_vector c_;
  double d_;
};

// |x_j| for a single coordinate j; sign(0) := 0.
class absolute_coordinate : public component_oracle {
 public:
  absolute_coordinate(std::size_t dim, std::size_t coord)
      : dim_(dim), coord_(coord) {
    if (coord_ >= dim_)
      throw std::invalid_argument("absolute_coordinate: coordinate out of range");
  }

  std::size_t dimension() const override { return dim_; }
  double value(const dense_vector &x) const override {
    require_same_dim(dim_, x.size(), "absolute_coordinate::value");
    return std::abs(x[coord_]);
  }
  dense_vector subgradient(const dense_vector &x) const override {
    require_same_dim(dim_, x.size(), "absolute_coordinate::subgradient");
    dense_vector g(dim_, 0.0);
    g[coord_] = sign_or_zero(x[coord_]);
    return g;
  }

 private:
  std::size_t dim_;
  std::size_t coord_;
};

// (mu/2)||x||_2^2 + ||x||_1, strongly convex with modulus mu. At the l1 kinks
// the zero element is selected: subgrad_j = mu*x_j + sign(x_j), sign(0) = 0.
class elastic_net : public upper_oracle {
 public:
  elastic_net(std::size_t dim, double mu) : dim_(dim), mu_(mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("elastic_net: mu must be > 0");
  }

  std::size_t dimension() const override { return dim_; }
  double mu() const override { return mu_; }

  double value(const dense_vector &x) const override {
    require_same_dim(dim_, x.size(), "elastic_net::value");
    const auto n = norms(x);
    return 0.5 * mu_ * n.l2 * n.l2 + n.l1;
  }

  dense_vector subgradient(const dense_vector &x) const override {
    require_same_dim(dim_, x.size(), "elastic_net::subgradient");
    std::vector<double> g(dim_);
    for (std::size_t j = 0; j < dim_; ++j) g[j] = mu_ * x[j] + sign_or_zero(x[j]);
    return dense_vector(std::move(g));
  }

 private:
  std::size_t dim_;
  double mu_;
};

// (mu/2)||x - c||_2^2; smooth, strongly convex, unconstrained minimizer at c.
class shifted_quadratic : public upper_oracle {
 public:
  shifted_quadratic(dense_vector center, double mu)
      : c_(std::move(center)), mu_(mu) {
    if (!(mu > 0.0))
      throw std::invalid_argument("shifted_quadratic: mu must be > 0");
  }

  std::size_t dimension() const override { return c_.size(); }
  double mu() const override { return mu_; }
  const dense_vector &center() const { return c_; }

  double value(const dense_vector &x) const override {
    const double d = distance(x, c_);
    return 0.5 * mu_ * d * d;
  }

  dense_vector subgradient(const dense_vector &x) const override {
    require_same_dim(c_.size(), x.size(), "shifted_quadratic::subgradient");
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = mu_ * (x[j] - c_[j]);
    return dense_vector(std::move(g));
  }

 private:
  dense_vector c_;
  double mu_;
};

// The full bilevel problem: minimize upper over the minimizers of
// sum_i components_i over the feasible set.
class problem_instance {
 public:
  problem_instance(std::vector<std::shared_ptr<const component_oracle>> components,
                   std::shared_ptr<const upper_oracle> upper, feasible_set feasible,
                   std::optional<double> known_f_star = std::nullopt,
                   std::optional<dense_vector> known_x_h_star = std::nullopt)
      : components_(std::move(components)),
        upper_(std::move(upper)),
        feasible_(std::move(feasible)),
        known_f_star_(known_f_star),
        known_x_h_star_(std::move(known_x_h_star)) {
    if (components_.empty())
      throw std::invalid_argument("problem_instance: need at least one component");
    if (!upper_) throw std::invalid_argument("problem_instance: null upper oracle");
    const std::size_t n = feasible_.dimension();
    for (const auto &c : components_) {
      if (!c) throw std::invalid_argument("problem_instance: null component");
      require_same_dim(c->dimension(), n, "problem_instance");
    }
    require_same_dim(upper_->dimension(), n, "problem_instance");
    if (known_x_h_star_) require_same_dim(known_x_h_star_->size(), n, "problem_instance");
    if (known_f_star_ && known_x_h_star_) {
      const double f_at_star = lower_value(*known_x_h_star_);
      if (std::abs(f_at_star - *known_f_star_) > 1e-9 * (1.0 + std::abs(*known_f_star_)))
        throw std::invalid_argument(
            "problem_instance: known_f_star inconsistent with known_x_h_star");
    }
  }

  std::size_t dimension() const { return feasible_.dimension(); }
  std::size_t m() const { return components_.size(); }
  const component_oracle &component(std::size_t i) const { return *components_[i]; }
  const upper_oracle &upper() const { return *upper_; }
  const feasible_set &feasible() const { return feasible_; }
  double mu_h() const { return upper_->mu(); }
  const std::optional<double> &known_f_star() const { return known_f_star_; }
  const std::optional<dense_vector> &known_x_h_star() const { return known_x_h_star_; }

  double lower_value(const dense_vector &x) const {
    double s = 0.0;
    for (const auto &c : components_) s += c->value(x);
    return s;
  }

  // sum of the component subgradients, one valid subgradient of f
  dense_vector lower_subgradient(const dense_vector &x) const {
    dense_vector g(dimension(), 0.0);
    for (const auto &c : components_) {
      const dense_vector gi = c->subgradient(x);
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += gi[j];
    }
    return g;
  }

  double upper_value(const dense_vector &x) const { return upper_->value(x); }

 private:
  std::vector<std::shared_ptr<const component_oracle>> components_;
  std::shared_ptr<const upper_oracle> upper_;
  feasible_set feasible_;
  std::optional<double> known_f_star_;
  std::optional<dense_vector> known_x_h_star_;
};

// Sampled bounding constants. These are lower bounds on the true suprema
// over X (they can only underestimate); the deterministic extreme points of
// the set are always included, which makes the estimates exact for the
// piecewise-linear / quadratic oracle families on boxes and balls.
struct constant_estimates {
  double C_f = 0.0;   // max_i sup ||g_{f_i}(x)||
  double C_h = 0.0;   // sup ||g_h(x)||
  double M = 0.0;     // sup ||x||  (analytic set bound)
  double M_h = 0.0;   // sup |h(x)|
};

inline constant_estimates estimate_constants(const problem_instance &p,
                                             std::size_t sample_count,
                                             std::uint64_t seed) {
  if (sample_count == 0)
    throw std::invalid_argument("estimate_constants: sample_count must be > 0");
  constant_estimates est;
  est.M = p.feasible().radius_bound();

  std::vector<dense_vector> points = p.feasible().extreme_points();
  rng gen(seed);
  points.reserve(points.size() + sample_count);
  for (std::size_t i = 0; i < sample_count; ++i)
    points.push_back(p.feasible().sample(gen));

  for (const auto &x : points) {
    for (std::size_t i = 0; i < p.m(); ++i)
      est.C_f = std::max(est.C_f, norm2(p.component(i).subgradient(x)));
    est.C_h = std::max(est.C_h, norm2(p.upper().subgradient(x)));
    est.M_h = std::max(est.M_h, std::abs(p.upper().value(x)));
  }
  return est;
}

}  // namespace irig
