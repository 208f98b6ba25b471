#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "irig/oracles.hpp"
#include "irig/schedule.hpp"

namespace irig {

// Explicit upper bound on f(x_bar_N) - f* for the averaged iterate after N
// outer iterations, evaluated termwise from the schedule and the bounding
// constants:
//   (sum_k gamma_k^r)^{-1} * ( m * sum_k gamma_k^{r+1} (C_f^2 + lambda_k^2 C_h^2)
//     + m^2 C_f * sum_k gamma_k^{r+1} (C_f + lambda_k C_h)
//     + 2 M_h * sum_k gamma_k^r lambda_k + 2 M^2 gamma_{N-1}^{r-1} ),
// sums over k = 0..N-1.
inline double averaging_bound_rhs(const power_schedule &s, std::uint64_t m,
                                  const constant_estimates &c, std::uint64_t N) {
  if (N == 0) throw std::invalid_argument("averaging_bound_rhs: N must be >= 1");
  const double md = static_cast<double>(m);
  double sum_wr = 0.0;        // sum gamma_k^r
  double sum_sq_term = 0.0;   // sum gamma_k^{r+1} (C_f^2 + lambda_k^2 C_h^2)
  double sum_lin_term = 0.0;  // sum gamma_k^{r+1} (C_f + lambda_k C_h)
  double sum_wr_lam = 0.0;    // sum gamma_k^r lambda_k
  for (std::uint64_t k = 0; k < N; ++k) {
    const double gam = s.gamma_at(k);
    const double lam = s.lambda_at(k);
    const double wr = std::pow(gam, s.r);
    sum_wr += wr;
    sum_sq_term += wr * gam * (c.C_f * c.C_f + lam * lam * c.C_h * c.C_h);
    sum_lin_term += wr * gam * (c.C_f + lam * c.C_h);
    sum_wr_lam += wr * lam;
  }
  const double tail = 2.0 * c.M * c.M * std::pow(s.gamma_at(N - 1), s.r - 1.0);
  return (md * sum_sq_term + md * md * c.C_f * sum_lin_term +
          2.0 * c.M_h * sum_wr_lam + tail) /
         sum_wr;
}

// Drift of the regularized minimizers between consecutive regularization
// levels: ||x*_{lam_cur} - x*_{lam_prev}|| <= (C_h / mu_h) |1 - lam_prev/lam_cur|.
inline double drift_bound_rhs(double C_h, double mu_h, double lambda_prev,
                              double lambda_cur) {
  return C_h / mu_h * std::abs(1.0 - lambda_prev / lambda_cur);
}

// Recursive per-iteration error bound: with d_k = ||x_k - x*_{lam_{k-1}}||^2,
//   ||x_{k+1} - x*_{lam_k}||^2 <= (1 - gam lam mu_h / (2m)) d_k
//     + 3 m C_h^2 / (gam lam mu_h^3) * (1 - lam_prev/lam)^2
//     + 6 m^2 gam^2 (C_f^2 + lam^2 C_h^2).
inline double recursive_bound_rhs(double prev_sq_dist, double gamma_k,
                                  double lambda_k, double lambda_prev, double mu_h,
                                  std::uint64_t m, double C_f, double C_h) {
  const double md = static_cast<double>(m);
  const double ratio_err = 1.0 - lambda_prev / lambda_k;
  return (1.0 - gamma_k * lambda_k * mu_h / (2.0 * md)) * prev_sq_dist +
         3.0 * md * C_h * C_h / (gamma_k * lambda_k * mu_h * mu_h * mu_h) *
             ratio_err * ratio_err +
         6.0 * md * md * gamma_k * gamma_k *
             (C_f * C_f + lambda_k * lambda_k * C_h * C_h);
}

}  // namespace irig
