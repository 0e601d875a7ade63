#pragma once

// Self-verification suite: closed forms against independent quadrature.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "dirkde/kernels.hpp"
#include "dirkde/special.hpp"
#include "dirkde/sphere.hpp"

namespace dirkde {

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyOptions {
  bool inject_dq_typo = false;  // use 2^{-q/2+1} for d_q instead of 2^{-q/2}
};

namespace detail {

inline VerifyCheck relative_check(std::string name, double value, double expected, double tol) {
  const double err = std::fabs(value - expected) / std::fabs(expected);
  return {std::move(name), value, expected, err, tol, err < tol};
}

inline VerifyCheck absolute_check(std::string name, double value, double expected, double tol) {
  const double err = std::fabs(value - expected);
  return {std::move(name), value, expected, err, tol, err < tol};
}

// int_0^inf e^{-k r} r^s dr by double-exponential quadrature
inline double half_line_exp_moment(double k, double s) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double r) { return std::exp(-k * r) * std::pow(r, s); }, 1e-15);
}

}  // namespace detail

/// von Mises kernel constants from their defining half-line integrals.
struct QuadratureKernelConstants {
  double lambda_q = 0.0;
  double b_q = 0.0;
  double d_q = 0.0;
  double e_q = 0.0;
};

inline QuadratureKernelConstants von_mises_constants_by_quadrature(int q) {
  const double hq = 0.5 * q;
  const double j11 = detail::half_line_exp_moment(1.0, hq - 1.0);
  const double j12 = detail::half_line_exp_moment(1.0, hq);
  const double j21 = detail::half_line_exp_moment(2.0, hq - 1.0);
  const double j22 = detail::half_line_exp_moment(2.0, hq);
  return {std::pow(2.0, hq - 1.0) * std::exp(log_surface_area(q - 1)) * j11, j12 / j11, j21 / j11, j22 / j11};
}

/// c_{h,q}^{-1} = int_{Omega_q} L((1 - x^T mu)/h^2) dx on a pole-aligned grid.
inline double inverse_c_by_sphere_quadrature(const DirectionalKernel& L, int q, double h, int resolution) {
  const SphereGrid grid = build_sphere_grid(q, resolution);
  return integrate_sphere([&](std::span<const double> x) { return L((1.0 - x[0]) / (h * h)); }, grid);
}

inline std::vector<VerifyCheck> run_verification(const VerifyOptions& opt = {}) {
  std::vector<VerifyCheck> out;
  const auto vm = DirectionalKernel::von_mises();
  const auto gauss = LinearKernel::gaussian();

  for (int q = 1; q <= 3; ++q) {
    KernelConstants kc = kernel_constants(vm, gauss, q);
    if (opt.inject_dq_typo) kc.d_q = std::pow(2.0, -0.5 * q + 1.0);
    const auto quad = von_mises_constants_by_quadrature(q);
    const std::string sq = "q=" + std::to_string(q);
    out.push_back(detail::relative_check("kernel lambda_q closed form vs quadrature " + sq, kc.lambda_q, quad.lambda_q, 1e-7));
    out.push_back(detail::relative_check("kernel b_q closed form vs quadrature " + sq, kc.b_q, quad.b_q, 1e-7));
    out.push_back(detail::relative_check("kernel d_q closed form vs quadrature " + sq, kc.d_q, quad.d_q, 1e-7));
    out.push_back(detail::relative_check("kernel e_q closed form vs quadrature " + sq, kc.e_q, quad.e_q, 1e-7));
  }

  for (int q = 1; q <= 2; ++q) {
    for (double h : {0.2, 0.5, 1.0}) {
      const double closed = 1.0 / c_hq(vm, q, h);
      const double direct = inverse_c_by_sphere_quadrature(vm, q, h, q == 1 ? 1024 : 256);
      out.push_back(detail::relative_check("c_hq closed form vs sphere quadrature q=" + std::to_string(q) + " h=" + std::to_string(h).substr(0, 4),
                                           closed, direct, 1e-8));
    }
  }

  for (int q = 1; q <= 3; ++q) {
    const SphereGrid grid = build_sphere_grid(q, 64);
    const double omega = surface_area(q);
    double worst_first = 0.0;
    double worst_second = 0.0;
    double worst_cross = 0.0;
    for (int i = 0; i <= q; ++i) {
      worst_first = std::max(worst_first, std::fabs(integrate_sphere([&](std::span<const double> x) { return x[i]; }, grid)));
      const double s2 = integrate_sphere([&](std::span<const double> x) { return x[i] * x[i]; }, grid);
      worst_second = std::max(worst_second, std::fabs(s2 - omega / (q + 1)) / (omega / (q + 1)));
      for (int j = i + 1; j <= q; ++j) {
        worst_cross = std::max(worst_cross, std::fabs(integrate_sphere([&](std::span<const double> x) { return x[i] * x[j]; }, grid)));
      }
    }
    const std::string sq = " q=" + std::to_string(q);
    out.push_back({"sphere first moments vanish" + sq, worst_first, 0.0, worst_first, 1e-10, worst_first < 1e-10});
    out.push_back({"sphere second moments equal omega_q/(q+1)" + sq, worst_second, 0.0, worst_second, 1e-7, worst_second < 1e-7});
    out.push_back({"sphere mixed second moments vanish" + sq, worst_cross, 0.0, worst_cross, 1e-10, worst_cross < 1e-10});
    double wsum = 0.0;
    for (double w : grid.weights) wsum += w;
    out.push_back(detail::relative_check("sphere grid weights sum to omega_q" + sq, wsum, omega, 1e-8));
  }

  for (int q = 1; q <= 3; ++q) {
    const double lq = std::pow(2.0 * std::numbers::pi, 0.5 * q);
    const double e05 = std::fabs(lambda_hq(vm, q, 0.5) / lq - 1.0);
    const double e02 = std::fabs(lambda_hq(vm, q, 0.2) / lq - 1.0);
    const double e005 = std::fabs(lambda_hq(vm, q, 0.05) / lq - 1.0);
    // at q = 2 the error is 2 pi e^{-2/h^2}, below rounding for h <= 0.2
    const bool ok = e005 < 0.01 && e02 < e05 && e005 <= std::max(e02, 1e-14);
    out.push_back({"lambda_hq -> lambda_q at h=0.05, monotone over h=0.5,0.2,0.05 q=" + std::to_string(q), e005, 0.0, e005, 0.01, ok});
  }

  for (double z : {0.1, 1.0, 10.0, 100.0}) {
    const double half = std::log(std::sqrt(2.0 / (std::numbers::pi * z))) + z + std::log1p(-std::exp(-2.0 * z)) - std::log(2.0);
    const double three_half = std::log(std::sqrt(2.0 / (std::numbers::pi * z))) +
                              std::log(std::cosh(std::min(z, 700.0)) - std::sinh(std::min(z, 700.0)) / z);
    out.push_back(detail::absolute_check("log I_1/2 vs closed form z=" + std::to_string(z).substr(0, 5), log_bessel_i(0.5, z), half, 1e-10));
    out.push_back(detail::absolute_check("log I_3/2 vs closed form z=" + std::to_string(z).substr(0, 5), log_bessel_i(1.5, z), three_half, 1e-10));
  }
  return out;
}

}  // namespace dirkde
