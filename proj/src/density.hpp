#pragma once

// Internal log-density kernels shared by the likelihood, the sampler and the
// deviance so all three agree bit for bit.

#include <cmath>
#include <span>

#include "svol/model.hpp"
#include "svol/moments.hpp"

namespace svol::detail {

inline constexpr double kLog2Pi = 1.8378770664093454;

inline double log_normal_pdf(double x, double mean, double var) noexcept {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

inline double mean_term(const ModelParams& p) noexcept {
  return p.kind == ModelKind::MeanCorrected ? mean_correction(p) : 0.0;
}

// log N(r_t; mu + rho e^{h_t/2}/sigma * innovation, e^{h_t}(1-rho^2)),
// written so that e^{h_t} never overflows on its own.
inline double log_meas(const ModelParams& p, double mu, double h_prev, double h_t,
                       double r) noexcept {
  const double one_m_r2 = 1.0 - p.rho * p.rho;
  double mean = mu;
  if (p.rho != 0.0) {
    const double innovation = h_t - p.alpha - p.phi * (h_prev - p.alpha);
    mean += p.rho * std::exp(h_t / 2.0) / p.sigma * innovation;
  }
  const double q = (r - mean) * std::exp(-h_t / 2.0);
  return -0.5 * (kLog2Pi + h_t + std::log(one_m_r2) + q * q / one_m_r2);
}

inline double log_trans(const ModelParams& p, double h_prev, double h_t) noexcept {
  return log_normal_pdf(h_t, p.alpha + p.phi * (h_prev - p.alpha),
                        p.sigma * p.sigma);
}

inline double log_stationary(const ModelParams& p, double h0) noexcept {
  return log_normal_pdf(h0, p.alpha, stationary_variance(p));
}

// Measurement part only: sum_t log f(r_t | h_t, h_{t-1}, Theta).
inline double measurement_loglik(const ModelParams& p, double h0,
                                 std::span<const double> h,
                                 std::span<const double> r) noexcept {
  const double mu = mean_term(p);
  double sum = 0.0;
  double h_prev = h0;
  for (std::size_t t = 0; t < h.size(); ++t) {
    sum += log_meas(p, mu, h_prev, h[t], r[t]);
    h_prev = h[t];
  }
  return sum;
}

}  // namespace svol::detail
