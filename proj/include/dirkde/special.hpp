#pragma once

// Special functions behind the von Mises-Fisher normalizing constants.
// Everything is returned as a logarithm: C_q(1/h^2) and I_nu(1/h^2) leave
// the double range long before the bandwidths of interest get small.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dirkde/errors.hpp"

namespace dirkde {

/// Natural log of a positive quantity.
struct LogValue {
  double log_magnitude = 0.0;

  double value() const { return std::exp(log_magnitude); }
  friend LogValue operator*(LogValue a, LogValue b) { return {a.log_magnitude + b.log_magnitude}; }
  friend LogValue operator/(LogValue a, LogValue b) { return {a.log_magnitude - b.log_magnitude}; }
};

inline double log_gamma(double p) {
  if (!(p > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(p));
  return std::lgamma(p);
}

namespace detail {

// sum_k (z/2)^{2k} / (k! Gamma(k+nu+1)) relative to its first term.
inline double bessel_i_series_log(double nu, double z) {
  const double quarter_z2 = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 10000; ++k) {
    term *= quarter_z2 / (static_cast<double>(k) * (static_cast<double>(k) + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) + std::log(sum);
}

// Hankel expansion I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k.
inline double bessel_i_asymptotic_log(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    const double mag = std::fabs(term);
    if (mag > last) break;  // series started diverging
    sum += term;
    if (mag < 1e-17 * std::fabs(sum)) break;
    last = mag;
  }
  return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(sum);
}

}  // namespace detail

/// ln I_nu(z) for nu >= 0, z >= 0. Returns -inf for I_nu(0) = 0 (nu > 0).
inline double log_bessel_i(double nu, double z) {
  if (nu < 0.0 || z < 0.0 || std::isnan(nu) || std::isnan(z)) {
    throw DomainError("log_bessel_i: negative argument");
  }
  if (z == 0.0) return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (z <= 30.0 + nu * nu) return detail::bessel_i_series_log(nu, z);
  return detail::bessel_i_asymptotic_log(nu, z);
}

/// ln of the surface area of the unit q-sphere, 2 pi^{(q+1)/2} / Gamma((q+1)/2).
/// Defined for q >= 0 (omega_0 = 2, the two points of the 0-sphere).
inline double log_surface_area(int q) {
  if (q < 0) throw DomainError("surface area: q must be >= 0");
  const double a = 0.5 * (q + 1);
  return std::log(2.0) + a * std::log(std::numbers::pi) - std::lgamma(a);
}

/// Below this concentration C_q is evaluated from its small-kappa series.
inline constexpr double kSmallKappa = 1e-6;

/// ln C_q(kappa), C_q(kappa) = kappa^{(q-1)/2} / ((2 pi)^{(q+1)/2} I_{(q-1)/2}(kappa)).
inline double log_cq(int q, double kappa) {
  if (q < 1) throw DomainError("log_cq: q must be >= 1");
  if (kappa < 0.0 || std::isnan(kappa)) throw DomainError("log_cq: kappa must be >= 0");
  const double nu = 0.5 * (q - 1);
  if (kappa < kSmallKappa) {
    // I_nu(k) = (k/2)^nu / Gamma(nu+1) * (1 + k^2 / (4(nu+1)) + ...)
    return -log_surface_area(q) - kappa * kappa / (4.0 * (nu + 1.0));
  }
  return nu * std::log(kappa) - (nu + 1.0) * std::log(2.0 * std::numbers::pi) - log_bessel_i(nu, kappa);
}

/// D_q(h) = C_q(1/h^2)^2 / C_q(2/h^2), the squared L2 norm of a vM(., 1/h^2) kernel.
inline double dq_factor(int q, double h) {
  if (!(h > 0.0)) throw DomainError("dq_factor: h must be positive");
  const double a = 1.0 / (h * h);
  const double log_d = 2.0 * log_cq(q, a) - log_cq(q, 2.0 * a);
  const double d = std::exp(log_d);
  if (!std::isfinite(d) || d == 0.0) {
    throw NumericError("dq_factor: D_q(h) not representable for h = " + std::to_string(h));
  }
  return d;
}

}  // namespace dirkde
