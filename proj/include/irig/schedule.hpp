#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace irig {

// Power-law step and regularization sequences
//   gamma_k = gamma0 / (k+1)^a,   lambda_k = lambda0 / (k+1)^b,
// plus the averaging exponent r (weights proportional to gamma_k^r).
//
// Construction requires positive gamma0, lambda0, a, b only. Admissibility of
// (a, b, r) against a problem's (m, mu_h) is reported by validate(), not
// enforced here, so that inadmissible schedules can be built and inspected.
struct power_schedule {
  double gamma0 = 1.0;
  double lambda0 = 1.0;
  double a = 0.55;
  double b = 0.4;
  double r = 0.5;

  power_schedule() = default;
  power_schedule(double gamma0_, double lambda0_, double a_, double b_, double r_)
      : gamma0(gamma0_), lambda0(lambda0_), a(a_), b(b_), r(r_) {
    if (!(gamma0 > 0.0) || !(lambda0 > 0.0))
      throw std::invalid_argument("power_schedule: gamma0, lambda0 must be > 0");
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("power_schedule: exponents a, b must be > 0");
  }

  double gamma_at(std::uint64_t k) const {
    return gamma0 / std::pow(static_cast<double>(k + 1), a);
  }
  double lambda_at(std::uint64_t k) const {
    return lambda0 / std::pow(static_cast<double>(k + 1), b);
  }
  double gamma_pow_r_at(std::uint64_t k) const {
    return std::pow(gamma_at(k), r);
  }
};

enum class schedule_check {
  gamma0_lambda0_bound,  // gamma0 * lambda0 <= 2m / mu_h
  a_gt_b,                // a > b
  a_gt_half,             // a > 0.5
  a_plus_b_lt_one,       // a + b < 1
  ar_le_one,             // a * r <= 1
  r_lt_one,              // r < 1
};

inline const char *to_string(schedule_check c) {
  switch (c) {
    case schedule_check::gamma0_lambda0_bound: return "gamma0*lambda0 <= 2m/mu_h";
    case schedule_check::a_gt_b: return "a > b";
    case schedule_check::a_gt_half: return "a > 0.5";
    case schedule_check::a_plus_b_lt_one: return "a + b < 1";
    case schedule_check::ar_le_one: return "a*r <= 1";
    case schedule_check::r_lt_one: return "r < 1";
  }
  return "?";
}

struct schedule_report {
  bool ok = true;
  std::vector<schedule_check> violations;

  bool violated(schedule_check c) const {
    for (auto v : violations)
      if (v == c) return true;
    return false;
  }
};

// Checks every admissibility condition independently; violations are data.
inline schedule_report validate(const power_schedule &s, std::uint64_t m,
                                double mu_h) {
  if (m == 0) throw std::invalid_argument("validate: m must be >= 1");
  if (!(mu_h > 0.0)) throw std::invalid_argument("validate: mu_h must be > 0");
  schedule_report rep;
  auto check = [&rep](bool pass, schedule_check c) {
    if (!pass) {
      rep.ok = false;
      rep.violations.push_back(c);
    }
  };
  check(s.gamma0 * s.lambda0 <= 2.0 * static_cast<double>(m) / mu_h,
        schedule_check::gamma0_lambda0_bound);
  check(s.a > s.b, schedule_check::a_gt_b);
  check(s.a > 0.5, schedule_check::a_gt_half);
  check(s.a + s.b < 1.0, schedule_check::a_plus_b_lt_one);
  check(s.a * s.r <= 1.0, schedule_check::ar_le_one);
  check(s.r < 1.0, schedule_check::r_lt_one);
  return rep;
}

// Exponents a = 0.5 + 0.5*eps, b = 0.5 - eps give an O(1/N^(0.5-eps)) decay
// of the averaged lower-level gap; a > b, a > 0.5 and a + b < 1 hold for
// every eps in (0, 0.5) by construction.
inline power_schedule rate_schedule(double epsilon, double gamma0,
                                    double lambda0, double r) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5))
    throw std::invalid_argument("rate_schedule: epsilon must lie in (0, 0.5)");
  return power_schedule(gamma0, lambda0, 0.5 + 0.5 * epsilon, 0.5 - epsilon, r);
}

// Normalized averaging weights psi_{t,k} = gamma_t^r / sum_{i<=k} gamma_i^r
// for t = 0..k. Positive and summing to 1; the normalizer is accumulated with
// compensated summation so the property survives k in the millions.
inline std::vector<double> closed_form_weights(const power_schedule &s,
                                               std::uint64_t k) {
  std::vector<double> w(k + 1);
  double total = 0.0, carry = 0.0;
  for (std::uint64_t t = 0; t <= k; ++t) {
    w[t] = s.gamma_pow_r_at(t);
    const double y = w[t] - carry;
    const double next = total + y;
    carry = (next - total) - y;
    total = next;
  }
  for (auto &x : w) x /= total;
  return w;
}

}  // namespace irig
