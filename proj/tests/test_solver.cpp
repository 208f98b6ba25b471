#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <sstream>

#include "irig/bounds.hpp"
#include "irig/generators.hpp"
#include "irig/solver.hpp"

using namespace irig;

namespace {

problem_instance p2() { return gen_selection_problem(selection_spec{}); }

// 1-D bilevel toy: f = m * |x| on [-1, 1], h = (1/2)(x - 1)^2
problem_instance abs_toy(std::size_t m) {
  std::vector<std::shared_ptr<const component_oracle>> comps;
  for (std::size_t i = 0; i < m; ++i)
    comps.push_back(std::make_shared<absolute_coordinate>(1, 0));
  auto upper = std::make_shared<shifted_quadratic>(dense_vector{1.0}, 1.0);
  return problem_instance(std::move(comps), std::move(upper),
                          feasible_set::centered_box(1, 1.0));
}

double segment_distance(const dense_vector &p, const dense_vector &a,
                        const dense_vector &b) {
  const dense_vector ab = axpy(-1.0, a, b);
  const dense_vector ap = axpy(-1.0, a, p);
  const double denom = dot(ab, ab);
  double t = denom > 0.0 ? dot(ap, ab) / denom : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, axpy(t, ab, a));
}

}  // namespace

TEST_CASE("inner cycle on the 1-D toy") {
  auto p = abs_toy(1);
  // g_f(1) = 1, g_h(1) = 0
  CHECK(inner_cycle(dense_vector{1.0}, p, 0.5, 0.2)[0] ==
        Catch::Approx(0.5).margin(1e-12).epsilon(0.0));
  // tie rule g_f(0) = 0, g_h(0) = -1
  CHECK(inner_cycle(dense_vector{0.0}, p, 0.5, 0.2)[0] ==
        Catch::Approx(0.1).margin(1e-12).epsilon(0.0));
  // g_f(-1) = -1, g_h(-1) = -2
  CHECK(inner_cycle(dense_vector{-1.0}, p, 0.5, 0.2)[0] ==
        Catch::Approx(-0.3).margin(1e-12).epsilon(0.0));

  CHECK_THROWS_AS(inner_cycle(dense_vector{0.0}, p, 0.0, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(inner_cycle(dense_vector{0.0}, p, 0.5, -1.0),
                  std::invalid_argument);
}

TEST_CASE("average update recursion") {
  solver_state st;
  st.k = 0;
  st.x = dense_vector{0.0};
  st.x_bar = dense_vector{0.0};
  st.S = 1.0;

  auto next = update_average(st, dense_vector{2.0}, 1.0);
  CHECK(next.k == 1);
  CHECK(next.S == 2.0);
  CHECK(next.x_bar[0] == Catch::Approx(1.0).margin(1e-15).epsilon(0.0));

  solver_state st2;
  st2.x = dense_vector{4.0};
  st2.x_bar = dense_vector{1.0};
  st2.S = 2.0;
  auto n2 = update_average(st2, dense_vector{4.0}, 0.5);
  CHECK(n2.S == 2.5);
  CHECK(n2.x_bar[0] == Catch::Approx(1.6).margin(1e-15).epsilon(0.0));

  solver_state st3;
  st3.x = dense_vector{3.0};
  st3.x_bar = dense_vector{3.0};
  st3.S = 5.0;
  auto n3 = update_average(st3, dense_vector{100.0}, 1e-9);
  CHECK(n3.x_bar[0] == Catch::Approx(3.0).margin(1e-7).epsilon(0.0));

  CHECK_THROWS_AS(update_average(st, dense_vector{1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(update_average(st, dense_vector{1.0, 2.0}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("zero-iteration run returns the start point") {
  auto p = p2();
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  auto res = run_irig(p, s, 0, dense_vector{0.5, -0.5});
  CHECK(res.x_bar == dense_vector{0.5, -0.5});
  CHECK(res.tr.size() == 1);
  CHECK(res.tr.rows[0].k == 0);
}

TEST_CASE("averaged run approaches the bilevel solution on the 2-D instance") {
  auto p = p2();
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  auto res = run_irig(p, s, 10000, dense_vector{2.0, -2.0});
  CHECK(distance(res.x_bar, dense_vector{0.0, 1.5}) <= 0.1);
  CHECK(p.lower_value(res.x_bar) - 0.0 <= 0.05);
}

TEST_CASE("regularized reference solver matches analytic minimizers") {
  auto p = p2();
  // 0 in 2 d|x_1| + lambda (x_1 - 1) holds at x_1 = 0 for lambda <= 2
  const auto r1 = solve_regularized_reference(p, 1.0, 100000);
  CHECK(distance(r1, dense_vector{0.0, 1.5}) <= 1e-2);

  // lambda = 4: stationarity 2 + 4 (x_1 - 1) = 0 at x_1 = 0.5
  const auto r4 = solve_regularized_reference(p, 4.0, 100000);
  CHECK(distance(r4, dense_vector{0.5, 1.5}) <= 1e-2);

  CHECK_THROWS_AS(solve_regularized_reference(p, 0.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(solve_regularized_reference(p, 1.0, 0), std::invalid_argument);
}

TEST_CASE("warm-started ladder approaches the bilevel solution") {
  auto p = p2();
  const auto x = reference_ladder(p, {1.0, 0.1, 0.01, 1e-3}, 50000);
  CHECK(distance(x, dense_vector{0.0, 1.5}) <= 5e-2);
  CHECK_THROWS_AS(reference_ladder(p, {}, 100), std::invalid_argument);
}

TEST_CASE("regularized minimizer of two quadratics lies on the segment") {
  auto f = std::make_shared<shifted_quadratic>(dense_vector{1.0, 0.0}, 1.0);
  auto h = std::make_shared<shifted_quadratic>(dense_vector{0.0, 1.0}, 1.0);
  problem_instance p({f}, h, feasible_set::centered_box(2, 10.0));
  for (double lam : {0.25, 1.0, 3.0}) {
    const auto x = solve_regularized_reference(p, lam, 100000);
    CHECK(segment_distance(x, dense_vector{1.0, 0.0}, dense_vector{0.0, 1.0}) <= 1e-3);
  }
}

TEST_CASE("iterates and averages stay feasible") {
  auto p = p2();
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  solver_state st;
  st.x = dense_vector{2.0, -2.0};
  st.x_bar = st.x;
  st.S = s.gamma_pow_r_at(0);
  for (std::uint64_t k = 0; k < 500; ++k) {
    auto x_next = inner_cycle(st.x, p, s.gamma_at(k), s.lambda_at(k));
    CHECK(p.feasible().contains(x_next, 1e-12));
    st = update_average(st, std::move(x_next), s.gamma_pow_r_at(k + 1));
    CHECK(p.feasible().contains(st.x_bar, 1e-12));
  }
}

TEST_CASE("recursive averaging equals the closed-form weights") {
  // random 5-D instance: quadratic components with distinct centers,
  // elastic-net upper level
  rng gen(77);
  std::vector<std::shared_ptr<const component_oracle>> comps;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> c(5);
    for (auto &v : c) v = gen.uniform(-1.0, 1.0);
    comps.push_back(std::make_shared<shifted_quadratic>(dense_vector(c), 1.0));
  }
  problem_instance p(comps, std::make_shared<elastic_net>(5, 0.5),
                     feasible_set::centered_box(5, 3.0));
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);

  std::vector<dense_vector> iterates;
  solver_state st;
  st.x = dense_vector{2.0, -1.0, 0.5, 3.0, -3.0};
  st.x_bar = st.x;
  st.S = s.gamma_pow_r_at(0);
  iterates.push_back(st.x);

  double weight_sum = s.gamma_pow_r_at(0);
  for (std::uint64_t k = 0; k < 200; ++k) {
    auto x_next = inner_cycle(st.x, p, s.gamma_at(k), s.lambda_at(k));
    iterates.push_back(x_next);
    st = update_average(st, std::move(x_next), s.gamma_pow_r_at(k + 1));

    // the accumulator tracks sum_{t<=k} gamma_t^r
    weight_sum += s.gamma_pow_r_at(k + 1);
    CHECK(st.S == Catch::Approx(weight_sum).epsilon(1e-9));

    const auto w = closed_form_weights(s, st.k);
    dense_vector direct(5, 0.0);
    for (std::size_t t = 0; t < w.size(); ++t)
      direct = axpy(w[t], iterates[t], direct);
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(st.x_bar[j] == Catch::Approx(direct[j]).margin(1e-9).epsilon(0.0));
  }

  // the full run wires the same recursion
  auto res = run_irig(p, s, 200, dense_vector{2.0, -1.0, 0.5, 3.0, -3.0});
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(res.x_bar[j] == Catch::Approx(st.x_bar[j]).margin(0.0).epsilon(0.0));
}

TEST_CASE("consecutive regularized minimizers drift within the bound") {
  auto p = p2();
  const auto est = estimate_constants(p, 512, 42);
  const double mu_h = p.mu_h();
  const double ref_tol = 1e-2;
  const std::uint64_t iters = 200000;
  auto lambda_at = [](std::uint64_t k) {
    return std::pow(static_cast<double>(k + 1), -0.4);
  };
  for (std::uint64_t k : {std::uint64_t{2}, std::uint64_t{5}, std::uint64_t{10}}) {
    const double lam_prev = lambda_at(k - 1);
    const double lam_cur = lambda_at(k);
    const auto x_prev = solve_regularized_reference(p, lam_prev, iters);
    const auto x_cur = solve_regularized_reference(p, lam_cur, iters);
    const double lhs = distance(x_cur, x_prev);
    const double rhs = drift_bound_rhs(est.C_h, mu_h, lam_prev, lam_cur) + 2.0 * ref_tol;
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("averaged f-gap obeys the explicit upper bound") {
  auto p = p2();
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  const auto est = estimate_constants(p, 512, 42);
  auto res = run_irig(p, s, 10000, dense_vector{2.0, -2.0});
  for (std::uint64_t N : {std::uint64_t{100}, std::uint64_t{1000}, std::uint64_t{10000}}) {
    const auto &row = res.tr.rows[N];  // stride 1: row index == k
    REQUIRE(row.k == N);
    REQUIRE(row.f_gap);
    CHECK(*row.f_gap <= averaging_bound_rhs(s, p.m(), est, N));
  }
}

TEST_CASE("per-iteration recursive error bound holds on a tiny instance") {
  auto p = abs_toy(2);
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  const auto est = estimate_constants(p, 256, 9);
  REQUIRE(validate(s, p.m(), p.mu_h()).ok);

  std::vector<dense_vector> xs{dense_vector{1.0}};
  for (std::uint64_t k = 0; k < 8; ++k)
    xs.push_back(inner_cycle(xs.back(), p, s.gamma_at(k), s.lambda_at(k)));

  const std::uint64_t iters = 200000;
  for (std::uint64_t k : {std::uint64_t{3}, std::uint64_t{6}}) {
    const auto x_star_prev = solve_regularized_reference(p, s.lambda_at(k - 1), iters);
    const auto x_star_cur = solve_regularized_reference(p, s.lambda_at(k), iters);
    const double prev_sq = std::pow(distance(xs[k], x_star_prev), 2);
    const double lhs = std::pow(distance(xs[k + 1], x_star_cur), 2);
    const double rhs = recursive_bound_rhs(prev_sq, s.gamma_at(k), s.lambda_at(k),
                                           s.lambda_at(k - 1), p.mu_h(), p.m(),
                                           est.C_f, est.C_h);
    CHECK(lhs <= rhs + 1e-2);
  }
}

TEST_CASE("identical configurations give bit-identical traces") {
  auto p = p2();
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  auto r1 = run_irig(p, s, 2000, dense_vector{2.0, -2.0});
  auto r2 = run_irig(p, s, 2000, dense_vector{2.0, -2.0});
  REQUIRE(r1.tr.size() == r2.tr.size());
  for (std::size_t i = 0; i < r1.tr.size(); ++i) {
    const auto &a = r1.tr.rows[i];
    const auto &b = r2.tr.rows[i];
    CHECK(a.k == b.k);
    CHECK(a.f_bar == b.f_bar);
    CHECK(a.f_gap == b.f_gap);
    CHECK(a.h_bar == b.h_bar);
    CHECK(a.dist_xstar == b.dist_xstar);
    CHECK(a.gamma_k == b.gamma_k);
    CHECK(a.lambda_k == b.lambda_k);
  }
  CHECK(r1.x_bar == r2.x_bar);
  CHECK(r1.x == r2.x);
}

TEST_CASE("inadmissible schedules are rejected unless overridden") {
  auto p = p2();
  power_schedule bad(100.0, 20.0, 0.55, 0.4, 0.5);  // bound 2000 > 2m/mu_h = 4
  CHECK_THROWS_AS(run_irig(p, bad, 10, dense_vector{0.0, 0.0}), validation_error);

  run_options opts;
  opts.override_schedule_check = true;
  CHECK_NOTHROW(run_irig(p, bad, 10, dense_vector{0.0, 0.0}, opts));
}

TEST_CASE("infeasible start points are projected with a warning") {
  auto p = p2();
  auto s = rate_schedule(0.1, 1.0, 1.0, 0.5);
  std::ostringstream log;
  run_options opts;
  opts.log = &log;
  auto res = run_irig(p, s, 0, dense_vector{5.0, 5.0}, opts);
  CHECK(res.x_bar == dense_vector{2.0, 2.0});
  CHECK(log.str().find("projected") != std::string::npos);
}
