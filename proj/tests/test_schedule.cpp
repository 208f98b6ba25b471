#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "irig/schedule.hpp"

using namespace irig;

TEST_CASE("power sequences") {
  power_schedule s(1.0, 2.0, 0.5, 0.5, 0.5);
  CHECK(s.gamma_at(3) == 0.5);  // (3+1)^0.5 = 2
  CHECK(s.lambda_at(0) == 2.0);

  power_schedule s2(1.0, 1.0, 0.55, 0.4, 0.5);
  CHECK(s2.gamma_at(0) == 1.0);
}

TEST_CASE("validate reports each condition independently") {
  // rate exponents with eps = 0.1 pass every check
  auto ok = validate(power_schedule(1.0, 1.0, 0.55, 0.4, 0.5), 2, 1.0);
  CHECK(ok.ok);
  CHECK(ok.violations.empty());

  // a = b fails the strict inequality
  auto ab = validate(power_schedule(1.0, 1.0, 0.6, 0.6, 0.5), 2, 1.0);
  CHECK_FALSE(ab.ok);
  CHECK(ab.violated(schedule_check::a_gt_b));

  // gamma0 * lambda0 = 2000 > 2m/mu_h = 1000
  auto bound = validate(power_schedule(100.0, 20.0, 0.55, 0.4, 0.5), 50, 0.1);
  CHECK_FALSE(bound.ok);
  CHECK(bound.violated(schedule_check::gamma0_lambda0_bound));
  CHECK_FALSE(bound.violated(schedule_check::a_gt_b));
}

TEST_CASE("rate_schedule builds the rate exponents") {
  auto s1 = rate_schedule(0.1, 1.0, 1.0, 0.5);
  CHECK(s1.a == Catch::Approx(0.55).margin(1e-15).epsilon(0.0));
  CHECK(s1.b == Catch::Approx(0.4).margin(1e-15).epsilon(0.0));

  auto s2 = rate_schedule(0.3, 1.0, 1.0, 0.5);
  CHECK(s2.a == Catch::Approx(0.65).margin(1e-15).epsilon(0.0));
  CHECK(s2.b == Catch::Approx(0.2).margin(1e-15).epsilon(0.0));

  CHECK_THROWS_AS(rate_schedule(0.6, 1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rate_schedule(0.0, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("rate_schedule satisfies a>b, a>0.5, a+b<1 across the eps range") {
  for (int i = 1; i < 100; ++i) {
    const double eps = 0.5 * i / 100.0;
    const auto s = rate_schedule(eps, 1.0, 1.0, 0.5);
    CHECK(s.a > s.b);
    CHECK(s.a > 0.5);
    CHECK(s.a + s.b < 1.0);
  }
}

TEST_CASE("closed-form averaging weights") {
  // single point
  auto one = closed_form_weights(power_schedule(1.0, 1.0, 0.7, 0.1, 0.5), 0);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 1.0);

  // gamma = (1, 0.25) via a = 2, so gamma^r = (1, 0.5) and psi = (2/3, 1/3)
  auto w = closed_form_weights(power_schedule(1.0, 1.0, 2.0, 0.1, 0.5), 1);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == Catch::Approx(2.0 / 3.0).margin(1e-15).epsilon(0.0));
  CHECK(w[1] == Catch::Approx(1.0 / 3.0).margin(1e-15).epsilon(0.0));

  // r = 0 gives uniform averaging
  auto u = closed_form_weights(power_schedule(3.0, 1.0, 0.9, 0.1, 0.0), 3);
  REQUIRE(u.size() == 4);
  for (double x : u) CHECK(x == Catch::Approx(0.25).margin(1e-15).epsilon(0.0));
}

TEST_CASE("weights are positive and sum to one, up to k = 1e6") {
  for (double r : {0.5, 0.0, -1.0}) {
    power_schedule s(1.0, 1.0, 0.55, 0.4, r);
    for (std::uint64_t k : {std::uint64_t{10}, std::uint64_t{1000},
                            std::uint64_t{1000000}}) {
      const auto w = closed_form_weights(s, k);
      REQUIRE(w.size() == k + 1);
      // compensated summation; a naive sum of 1e6 terms carries ~1e-11 of
      // its own rounding bias, which would mask the property under test
      double sum = 0.0, carry = 0.0;
      bool all_positive = true;
      for (double x : w) {
        if (!(x > 0.0)) all_positive = false;
        const double y = x - carry;
        const double next = sum + y;
        carry = (next - sum) - y;
        sum = next;
      }
      CHECK(all_positive);
      CHECK(sum == Catch::Approx(1.0).margin(1e-12).epsilon(0.0));
    }
  }
}

TEST_CASE("sequences decrease and keep gamma*lambda*mu below 2m") {
  power_schedule s(2.0, 2.0, 0.55, 0.4, 0.5);
  const std::uint64_t m = 2;
  const double mu_h = 1.0;
  REQUIRE(validate(s, m, mu_h).ok);
  double prev_g = std::numeric_limits<double>::infinity();
  double prev_l = prev_g;
  for (std::uint64_t k = 0; k <= 2000; ++k) {
    const double g = s.gamma_at(k), l = s.lambda_at(k);
    CHECK(g < prev_g);
    CHECK(l < prev_l);
    CHECK(g * l * mu_h <= 2.0 * static_cast<double>(m));
    prev_g = g;
    prev_l = l;
  }
}

TEST_CASE("negative r is allowed and makes the ar check vacuous") {
  power_schedule s(1.0, 1.0, 0.55, 0.4, -3.0);
  const auto rep = validate(s, 2, 1.0);
  CHECK(rep.ok);
  CHECK_THROWS_AS(power_schedule(0.0, 1.0, 0.5, 0.4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(power_schedule(1.0, 1.0, -0.5, 0.4, 0.5), std::invalid_argument);
}
