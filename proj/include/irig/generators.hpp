#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irig/dataset.hpp"
#include "irig/oracles.hpp"
#include "irig/solver.hpp"

namespace irig {

enum class upper_kind { quadratic, elastic };

// Ill-posed selection family: every lower-level component is |x_1|, so the
// lower level only pins the first coordinate and the strongly convex upper
// level selects among the remaining ones. The default is the 2-D instance
// with two components on [-2,2]^2 and h = (1/2)||x - (1, 1.5)||^2.
struct selection_spec {
  std::size_t dimension = 2;
  std::size_t components = 2;
  double box_halfwidth = 2.0;
  upper_kind upper = upper_kind::quadratic;
  dense_vector center{1.0, 1.5};  // quadratic only
  double mu_h = 1.0;
};

inline problem_instance gen_selection_problem(const selection_spec &spec) {
  if (spec.dimension == 0)
    throw std::invalid_argument("gen_selection_problem: dimension must be >= 1");
  if (spec.components == 0)
    throw std::invalid_argument("gen_selection_problem: need at least one component");
  if (!(spec.box_halfwidth > 0.0))
    throw std::invalid_argument("gen_selection_problem: box halfwidth must be > 0");

  const std::size_t n = spec.dimension;
  std::vector<std::shared_ptr<const component_oracle>> comps;
  comps.reserve(spec.components);
  for (std::size_t i = 0; i < spec.components; ++i)
    comps.push_back(std::make_shared<absolute_coordinate>(n, 0));

  feasible_set X = feasible_set::centered_box(n, spec.box_halfwidth);

  std::shared_ptr<const upper_oracle> upper;
  dense_vector x_star(n, 0.0);
  if (spec.upper == upper_kind::quadratic) {
    require_same_dim(spec.center.size(), n, "gen_selection_problem");
    upper = std::make_shared<shifted_quadratic>(spec.center, spec.mu_h);
    // minimizer of h over {0} x [-hw, hw]^(n-1): clamp the free coordinates
    for (std::size_t j = 1; j < n; ++j)
      x_star[j] = std::clamp(spec.center[j], -spec.box_halfwidth, spec.box_halfwidth);
  } else {
    upper = std::make_shared<elastic_net>(n, spec.mu_h);
    // the origin lies in the lower-level solution set and minimizes h globally
  }
  return problem_instance(std::move(comps), std::move(upper), std::move(X), 0.0,
                          std::move(x_star));
}

// Exact-penalty reformulation of affine constraints <c_i, x> <= d_i over a
// box: one max{0, q_i} component per constraint. The lower-level optimum is 0
// exactly when the constraint system is feasible within the box, which is
// checked by a reference probe run before the instance is returned.
struct constrained_spec {
  std::vector<std::pair<dense_vector, double>> constraints;  // (c_i, d_i)
  double box_halfwidth = 2.0;
  upper_kind upper = upper_kind::quadratic;
  dense_vector center;  // quadratic only; defaults to the origin
  double mu_h = 1.0;
  std::uint64_t probe_iters = 60000;
  double probe_tol = 0.5;
};

namespace detail {

// x*_h candidate for a quadratic upper level: the clamped center if feasible,
// else the halfspace projection onto the single violated constraint when that
// projection satisfies everything else. Otherwise unknown.
inline std::optional<dense_vector> constrained_quadratic_solution(
    const constrained_spec &spec, const feasible_set &X, const dense_vector &center) {
  auto feasible_for_constraints = [&](const dense_vector &x, double tol) {
    for (const auto &[c, d] : spec.constraints)
      if (dot(c, x) - d > tol) return false;
    return true;
  };
  const dense_vector clamped = X.project(center);
  if (feasible_for_constraints(clamped, 0.0)) return clamped;

  std::optional<std::size_t> violated;
  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    if (dot(spec.constraints[i].first, center) - spec.constraints[i].second > 0.0) {
      if (violated) return std::nullopt;  // more than one active constraint
      violated = i;
    }
  }
  if (!violated) return std::nullopt;
  const auto &[c, d] = spec.constraints[*violated];
  const double c_sq = dot(c, c);
  if (c_sq == 0.0) return std::nullopt;
  const double shift = (dot(c, center) - d) / c_sq;
  dense_vector proj = center;
  for (std::size_t j = 0; j < proj.size(); ++j) proj[j] -= shift * c[j];
  if (X.contains(proj, 0.0) && feasible_for_constraints(proj, 1e-12)) return proj;
  return std::nullopt;
}

}  // namespace detail

inline problem_instance gen_constrained_problem(const constrained_spec &spec) {
  if (spec.constraints.empty())
    throw std::invalid_argument("gen_constrained_problem: need at least one constraint");
  if (!(spec.box_halfwidth > 0.0))
    throw std::invalid_argument("gen_constrained_problem: box halfwidth must be > 0");
  const std::size_t n = spec.constraints.front().first.size();
  for (const auto &[c, d] : spec.constraints)
    require_same_dim(c.size(), n, "gen_constrained_problem");

  std::vector<std::shared_ptr<const component_oracle>> comps;
  comps.reserve(spec.constraints.size());
  for (const auto &[c, d] : spec.constraints)
    comps.push_back(std::make_shared<constraint_penalty>(
        std::make_shared<affine_function>(c, d)));

  feasible_set X = feasible_set::centered_box(n, spec.box_halfwidth);

  if (spec.center.size() != 0 && spec.center.size() != n)
    throw std::invalid_argument("gen_constrained_problem: center dimension mismatch");
  dense_vector center = spec.center.size() == n ? spec.center : dense_vector(n, 0.0);
  std::shared_ptr<const upper_oracle> upper;
  if (spec.upper == upper_kind::quadratic)
    upper = std::make_shared<shifted_quadratic>(center, spec.mu_h);
  else
    upper = std::make_shared<elastic_net>(n, spec.mu_h);

  problem_instance candidate(comps, upper, X);

  // Feasibility probe: drive the regularized reference toward small lambda
  // and require the residual penalty to vanish.
  const constant_estimates est = estimate_constants(candidate, 64, 7);
  const double probe_lambda =
      std::min(1e-2, spec.probe_tol / (2.0 * std::max(1.0, est.M_h)));
  const dense_vector probe =
      solve_regularized_reference(candidate, probe_lambda, spec.probe_iters);
  const double residual = candidate.lower_value(probe);
  if (residual > spec.probe_tol)
    throw std::runtime_error(
        "gen_constrained_problem: constraint system looks infeasible within the "
        "box (probe penalty " +
        format_sig17(residual) + " > " + format_sig17(spec.probe_tol) + ")");

  std::optional<dense_vector> x_star;
  if (spec.upper == upper_kind::quadratic) {
    x_star = detail::constrained_quadratic_solution(spec, X, center);
  } else {
    dense_vector origin(n, 0.0);
    bool origin_ok = true;
    for (const auto &[c, d] : spec.constraints)
      if (dot(c, origin) - d > 0.0) origin_ok = false;
    if (origin_ok && X.contains(origin, 0.0)) x_star = origin;
  }
  return problem_instance(std::move(comps), std::move(upper), std::move(X), 0.0,
                          std::move(x_star));
}

// Hinge-loss classification problem over a dataset: the samples are split
// into m contiguous batches, each batch one lower-level component, with an
// elastic-net upper level and a large enclosing box.
inline problem_instance make_hinge_problem(const labeled_dataset &data,
                                           std::size_t batches, double mu_h,
                                           double box_halfwidth = 1e3) {
  std::vector<hinge_batch> parts = partition_batches(data, batches);
  std::vector<std::shared_ptr<const component_oracle>> comps;
  comps.reserve(parts.size());
  for (auto &b : parts)
    comps.push_back(std::make_shared<hinge_batch>(std::move(b)));
  auto upper = std::make_shared<elastic_net>(data.dimension, mu_h);
  return problem_instance(std::move(comps), std::move(upper),
                          feasible_set::centered_box(data.dimension, box_halfwidth));
}

}  // namespace irig
