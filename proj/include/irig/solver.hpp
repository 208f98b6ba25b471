#pragma once

#include <chrono>
#include <string>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irig/oracles.hpp"
#include "irig/schedule.hpp"

namespace irig {

// Thrown when a run is requested with an inadmissible schedule and the
// caller did not override the gate.
struct validation_error : std::runtime_error {
  schedule_report report;
  validation_error(std::string msg, schedule_report rep)
      : std::runtime_error(std::move(msg)), report(std::move(rep)) {}
};

struct trace_row {
  std::uint64_t k = 0;
  double f_bar = 0.0;
  std::optional<double> f_gap;       // present when f* is known or estimated
  double h_bar = 0.0;
  std::optional<double> dist_xstar;  // present when x*_h is known
  double gamma_k = 0.0;
  double lambda_k = 0.0;
  std::optional<double> elapsed_s;   // present when timing was enabled
};

struct trace {
  std::vector<trace_row> rows;
  bool f_star_estimated = false;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
};

// Running state of the averaged iteration: current iterate x_k, weighted
// average x_bar_k and the weight accumulator S_k = sum_{t<=k} gamma_t^r.
struct solver_state {
  std::uint64_t k = 0;
  dense_vector x;
  dense_vector x_bar;
  double S = 0.0;
};

// One incremental cycle: starting from x_k, visit the components in fixed
// order 1..m, each time stepping along the component subgradient plus the
// (lambda_k/m)-weighted upper-level subgradient and projecting back onto X.
inline dense_vector inner_cycle(const dense_vector &x_k, const problem_instance &p,
                                double gamma_k, double lambda_k) {
  if (!std::isfinite(gamma_k) || !std::isfinite(lambda_k))
    throw std::invalid_argument("inner_cycle: non-finite step inputs");
  if (!(gamma_k > 0.0) || !(lambda_k > 0.0))
    throw std::invalid_argument("inner_cycle: gamma_k and lambda_k must be > 0");
  require_same_dim(x_k.size(), p.dimension(), "inner_cycle");

  const double lam_over_m = lambda_k / static_cast<double>(p.m());
  dense_vector x = x_k;
  for (std::size_t i = 0; i < p.m(); ++i) {
    const dense_vector gf = p.component(i).subgradient(x);
    const dense_vector gh = p.upper().subgradient(x);
    std::vector<double> next(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      next[j] = x[j] - gamma_k * (gf[j] + lam_over_m * gh[j]);
    x = p.feasible().project(dense_vector(std::move(next)));
  }
  return x;
}

// S_{k+1} = S_k + w,  x_bar_{k+1} = (S_k x_bar_k + w x_{k+1}) / S_{k+1}
// with w = gamma_{k+1}^r.
inline solver_state update_average(const solver_state &state, dense_vector x_next,
                                   double gamma_next_pow_r) {
  if (!(gamma_next_pow_r > 0.0) || !std::isfinite(gamma_next_pow_r))
    throw std::invalid_argument("update_average: weight must be positive");
  if (!(state.S > 0.0))
    throw std::invalid_argument("update_average: accumulator must be positive");
  require_same_dim(state.x_bar.size(), x_next.size(), "update_average");
  solver_state next;
  next.k = state.k + 1;
  next.S = state.S + gamma_next_pow_r;
  std::vector<double> bar(state.x_bar.size());
  for (std::size_t j = 0; j < bar.size(); ++j)
    bar[j] = (state.S * state.x_bar[j] + gamma_next_pow_r * x_next[j]) / next.S;
  next.x_bar = dense_vector(std::move(bar));
  next.x = std::move(x_next);
  return next;
}

struct run_options {
  std::uint64_t record_stride = 1;
  bool measure_time = false;           // timing off keeps traces bit-identical
  bool override_schedule_check = false;
  std::optional<double> estimated_f_star;  // used for f_gap when f* unknown
  std::ostream *log = nullptr;
};

struct run_result {
  dense_vector x_bar;  // returned average x_bar_N
  dense_vector x;      // final iterate x_N
  trace tr;
};

// Full iteratively regularized incremental projected subgradient run:
// N outer iterations of inner_cycle followed by the weighted-average update.
// Initialization follows x_bar_0 = x0 and S_0 = gamma_0^r; the first average
// update uses weight gamma_1^r. Deterministic: identical inputs give
// bit-identical iterates and traces (timing excluded when enabled).
inline run_result run_irig(const problem_instance &p, const power_schedule &s,
                           std::uint64_t N, const dense_vector &x0,
                           const run_options &opts = {}) {
  if (opts.record_stride == 0)
    throw std::invalid_argument("run_irig: record_stride must be >= 1");
  const schedule_report rep = validate(s, p.m(), p.mu_h());
  if (!rep.ok && !opts.override_schedule_check) {
    std::string msg = "run_irig: schedule fails validation:";
    for (auto v : rep.violations) {
      msg += ' ';
      msg += to_string(v);
      msg += ';';
    }
    throw validation_error(msg, rep);
  }

  solver_state st;
  st.k = 0;
  st.x = x0;
  if (!p.feasible().contains(st.x, 0.0)) {
    st.x = p.feasible().project(st.x);
    if (opts.log)
      *opts.log << "warning: initial point outside the feasible set; projected\n";
  }
  st.x_bar = st.x;
  st.S = s.gamma_pow_r_at(0);

  std::optional<double> f_star = p.known_f_star();
  bool estimated = false;
  if (!f_star && opts.estimated_f_star) {
    f_star = opts.estimated_f_star;
    estimated = true;
  }

  const auto t0 = std::chrono::steady_clock::now();
  run_result res;
  res.tr.f_star_estimated = estimated;

  auto record = [&](const solver_state &state) {
    trace_row row;
    row.k = state.k;
    row.f_bar = p.lower_value(state.x_bar);
    if (f_star) row.f_gap = row.f_bar - *f_star;
    row.h_bar = p.upper_value(state.x_bar);
    if (p.known_x_h_star())
      row.dist_xstar = distance(state.x_bar, *p.known_x_h_star());
    row.gamma_k = s.gamma_at(state.k);
    row.lambda_k = s.lambda_at(state.k);
    if (opts.measure_time)
      row.elapsed_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    res.tr.rows.push_back(std::move(row));
  };

  record(st);
  for (std::uint64_t k = 0; k < N; ++k) {
    dense_vector x_next = inner_cycle(st.x, p, s.gamma_at(k), s.lambda_at(k));
    st = update_average(st, std::move(x_next), s.gamma_pow_r_at(k + 1));
    if (st.k % opts.record_stride == 0 || st.k == N) record(st);
  }

  res.x_bar = st.x_bar;
  res.x = st.x;
  return res;
}

// Reference solver for the lambda-regularized problem
//   minimize f(x) + lambda h(x) over X:
// plain projected subgradient with the strongly convex step rule
// c / (mu_h * lambda * (k+1)), uniformly averaged. This is an oracle used to
// approximate x*_lambda for bound checks, not the method under test.
inline dense_vector solve_regularized_reference(
    const problem_instance &p, double lambda, std::uint64_t iters, double c = 1.0,
    const std::optional<dense_vector> &x_start = std::nullopt) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_regularized_reference: lambda must be > 0");
  if (iters == 0)
    throw std::invalid_argument("solve_regularized_reference: iters must be > 0");

  dense_vector x = x_start ? p.feasible().project(*x_start)
                           : p.feasible().project(dense_vector(p.dimension(), 0.0));
  dense_vector avg(p.dimension(), 0.0);
  const double denom = p.mu_h() * lambda;
  for (std::uint64_t k = 0; k < iters; ++k) {
    const dense_vector gf = p.lower_subgradient(x);
    const dense_vector gh = p.upper().subgradient(x);
    const double step = c / (denom * static_cast<double>(k + 1));
    std::vector<double> next(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      next[j] = x[j] - step * (gf[j] + lambda * gh[j]);
    x = p.feasible().project(dense_vector(std::move(next)));
    for (std::size_t j = 0; j < x.size(); ++j)
      avg[j] += (x[j] - avg[j]) / static_cast<double>(k + 1);
  }
  return avg;
}

// Decreasing-lambda ladder approximating the bilevel solution x*_h; each
// stage warm-starts from the previous stage's averaged solution.
inline dense_vector reference_ladder(const problem_instance &p,
                                     const std::vector<double> &lambdas,
                                     std::uint64_t iters_per_stage, double c = 1.0) {
  if (lambdas.empty())
    throw std::invalid_argument("reference_ladder: need at least one lambda");
  std::optional<dense_vector> warm;
  for (double lam : lambdas)
    warm = solve_regularized_reference(p, lam, iters_per_stage, c, warm);
  return *warm;
}

}  // namespace irig
