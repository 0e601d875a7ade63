#pragma once

// Directional and linear kernels, and the kernel constants entering the
// bias, variance and MISE expansions.

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dirkde/errors.hpp"
#include "dirkde/quadrature.hpp"
#include "dirkde/special.hpp"
#include "dirkde/sphere.hpp"

namespace dirkde {

enum class DirectionalKernelKind { VonMises, Custom };
enum class LinearKernelKind { Gaussian, Custom };

namespace detail {

struct HalfLineMoment {
  double value = 0.0;
  bool converged = false;
};

// int_0^inf L(r)^power r^s dr for s >= -1/2, with a tail monitor: tails over
// [T, 2T], T = 2^m, must fall below 1e-16 of the running total before T = 2^62.
// Integrands decaying no faster than r^{-1.8} are reported as not converged.
inline HalfLineMoment half_line_moment(const std::function<double(double)>& L, int power, double s) {
  auto integrand = [&](double r) { return std::pow(L(r), power) * std::pow(r, s); };
  // r = u^2 on [0, 1] removes the r^{-1/2} endpoint singularity
  double total = integrate_adaptive(
      [&](double u) { return u == 0.0 && s < -0.25 ? 2.0 * std::pow(L(0.0), power) : 2.0 * std::pow(L(u * u), power) * std::pow(u, 2.0 * s + 1.0); },
      0.0, 1.0);
  for (int m = 0; m < 62; ++m) {
    const double lo = std::ldexp(1.0, m);
    const double tail = integrate_adaptive(integrand, lo, 2.0 * lo, 1e-12, 12);
    total += tail;
    if (m >= 4 && std::fabs(tail) <= 1e-16 * std::fabs(total)) return {total, true};
  }
  return {total, false};
}

inline void require_finite_nonnegative(const std::function<double(double)>& L) {
  for (int i = 0; i <= 2000; ++i) {
    const double r = 0.01 * i;
    const double v = L(r);
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("directional kernel profile must be finite and nonnegative (fails at r = " + std::to_string(r) + ")");
    }
  }
}

}  // namespace detail

class DirectionalKernel {
 public:
  static DirectionalKernel von_mises() { return DirectionalKernel(DirectionalKernelKind::VonMises, nullptr, 0.0); }

  /// User profile L(r), r >= 0. The integrability of L and L^2 against
  /// r^{q/2-1} and r^{q/2} is screened numerically for the given q.
  static DirectionalKernel custom(std::function<double(double)> profile, int q, double decay_certificate = 0.0) {
    DirectionalKernel k(DirectionalKernelKind::Custom, std::move(profile), decay_certificate);
    k.validate(q);
    return k;
  }

  DirectionalKernelKind kind() const { return kind_; }
  bool is_von_mises() const { return kind_ == DirectionalKernelKind::VonMises; }
  double decay_certificate() const { return decay_certificate_; }

  double operator()(double r) const { return is_von_mises() ? std::exp(-r) : profile_(r); }

  std::function<double(double)> profile() const {
    if (is_von_mises()) return [](double r) { return std::exp(-r); };
    return profile_;
  }

  /// Throws DomainError when a defining integral vanishes or fails the tail monitor.
  void validate(int q) const {
    if (q < 1) throw DomainError("directional kernel: q must be >= 1");
    if (is_von_mises()) return;
    detail::require_finite_nonnegative(profile_);
    for (int power : {1, 2}) {
      for (double s : {0.5 * q - 1.0, 0.5 * q}) {
        const auto m = detail::half_line_moment(profile_, power, s);
        if (!m.converged) {
          throw DomainError("directional kernel: integral of L^" + std::to_string(power) + " r^" + std::to_string(s) +
                            " does not converge (tail does not decay)");
        }
        if (!(m.value > 0.0)) throw DomainError("directional kernel: defining integral is not positive");
      }
    }
  }

 private:
  DirectionalKernel(DirectionalKernelKind kind, std::function<double(double)> profile, double cert)
      : kind_(kind), profile_(std::move(profile)), decay_certificate_(cert) {}

  DirectionalKernelKind kind_;
  std::function<double(double)> profile_;
  double decay_certificate_ = 0.0;
};

class LinearKernel {
 public:
  static LinearKernel gaussian() { return LinearKernel(LinearKernelKind::Gaussian, nullptr); }

  /// Symmetric density K(v); symmetry, unit mass and a finite second moment are checked.
  static LinearKernel custom(std::function<double(double)> density) {
    LinearKernel k(LinearKernelKind::Custom, std::move(density));
    for (int i = 0; i <= 1000; ++i) {
      const double v = 0.01 * i;
      const double a = k.density_(v);
      const double b = k.density_(-v);
      if (!std::isfinite(a) || a < 0.0) throw DomainError("linear kernel: density must be finite and nonnegative");
      if (std::fabs(a - b) >= 1e-12) throw DomainError("linear kernel: density is not symmetric about 0");
    }
    const double mass = integrate_adaptive(k.density_, -std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity(), 1e-12);
    if (std::fabs(mass - 1.0) >= 1e-8) throw DomainError("linear kernel: density does not integrate to 1");
    auto second = [&](double v) { return v * v * k.density_(v); };
    const double m2 = integrate_adaptive(second, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 1e-10);
    if (!std::isfinite(m2)) throw DomainError("linear kernel: second moment is not finite");
    return k;
  }

  LinearKernelKind kind() const { return kind_; }
  bool is_gaussian() const { return kind_ == LinearKernelKind::Gaussian; }

  double operator()(double v) const {
    if (is_gaussian()) return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
    return density_(v);
  }

 private:
  LinearKernel(LinearKernelKind kind, std::function<double(double)> density) : kind_(kind), density_(std::move(density)) {}

  LinearKernelKind kind_;
  std::function<double(double)> density_;
};

struct KernelConstants {
  int q = 0;
  double lambda_q = 0.0;
  double b_q = 0.0;
  double d_q = 0.0;
  double e_q = 0.0;
  double mu2_K = 0.0;
  double R_K = 0.0;
  double mu2_K2 = 0.0;
};

inline KernelConstants kernel_constants(const DirectionalKernel& L, const LinearKernel& K, int q) {
  if (q < 1 || q > 3) throw DomainError("kernel_constants: unsupported q = " + std::to_string(q));
  KernelConstants c;
  c.q = q;
  const double half_q = 0.5 * q;
  if (L.is_von_mises()) {
    c.lambda_q = std::pow(2.0 * std::numbers::pi, half_q);
    c.b_q = half_q;
    c.d_q = std::pow(2.0, -half_q);
    c.e_q = std::exp(std::lgamma(half_q + 1.0) - (half_q + 1.0) * std::log(2.0) - std::lgamma(half_q));
  } else {
    L.validate(q);
    const auto profile = L.profile();
    const double j11 = detail::half_line_moment(profile, 1, half_q - 1.0).value;
    const double j12 = detail::half_line_moment(profile, 1, half_q).value;
    const double j21 = detail::half_line_moment(profile, 2, half_q - 1.0).value;
    const double j22 = detail::half_line_moment(profile, 2, half_q).value;
    c.lambda_q = std::pow(2.0, half_q - 1.0) * std::exp(log_surface_area(q - 1)) * j11;
    c.b_q = j12 / j11;
    c.d_q = j21 / j11;
    c.e_q = j22 / j11;
  }
  if (K.is_gaussian()) {
    c.mu2_K = 1.0;
    c.R_K = 0.5 / std::sqrt(std::numbers::pi);
    c.mu2_K2 = 0.25 / std::sqrt(std::numbers::pi);
  } else {
    constexpr double inf = std::numeric_limits<double>::infinity();
    c.mu2_K = integrate_adaptive([&](double v) { return v * v * K(v); }, -inf, inf, 1e-12);
    c.R_K = integrate_adaptive([&](double v) { return K(v) * K(v); }, -inf, inf, 1e-12);
    c.mu2_K2 = integrate_adaptive([&](double v) { return v * v * K(v) * K(v); }, -inf, inf, 1e-12);
  }
  return c;
}

namespace detail {

// int_0^{2/h^2} Lp(r) r^{q/2-1} (2 - h^2 r)^{q/2-1} F(r) dr, split at r = 1/h^2:
// r = u^2 on the lower piece, r = 2/h^2 - v^2 on the upper one. Both
// substitutions leave smooth integrands, including the q = 1 endpoints.
template <class Lp, class F>
double radial_integral(Lp&& lp, int q, double h, F&& F_of_r) {
  const double h2 = h * h;
  const double top = 1.0 / h;
  const double hq = 0.5 * q - 1.0;
  auto lower = [&](double u) {
    const double r = u * u;
    return 2.0 * lp(r) * std::pow(u, q - 1) * std::pow(2.0 - r * h2, hq) * F_of_r(r);
  };
  auto upper = [&](double v) {
    const double r = 2.0 / h2 - v * v;
    return 2.0 * std::pow(h, q - 2) * lp(r) * std::pow(r, hq) * std::pow(v, q - 1) * F_of_r(r);
  };
  return integrate_adaptive(lower, 0.0, top) + integrate_adaptive(upper, 0.0, top);
}

}  // namespace detail

/// lambda_{h,q}(L) = omega_{q-1} int_0^{2/h^2} L(r) r^{q/2-1} (2 - r h^2)^{q/2-1} dr.
inline double lambda_hq(const DirectionalKernel& L, int q, double h) {
  if (!(h > 0.0)) throw DomainError("lambda_hq: h must be positive");
  if (q < 1) throw DomainError("lambda_hq: q must be >= 1");
  const double integral = detail::radial_integral([&](double r) { return L(r); }, q, h, [](double) { return 1.0; });
  return std::exp(log_surface_area(q - 1)) * integral;
}

/// ln c_{h,q}(L). For the von Mises kernel c = C_q(1/h^2) e^{1/h^2}.
inline double log_c_hq(const DirectionalKernel& L, int q, double h) {
  if (!(h > 0.0)) throw DomainError("c_hq: h must be positive");
  if (L.is_von_mises()) {
    const double a = 1.0 / (h * h);
    return log_cq(q, a) + a;
  }
  return -(q * std::log(h) + std::log(lambda_hq(L, q, h)));
}

/// Normalizing constant c_{h,q}(L) of the directional estimator.
inline double c_hq(const DirectionalKernel& L, int q, double h) {
  const double v = std::exp(log_c_hq(L, q, h));
  if (!std::isfinite(v)) throw NumericError("c_hq: value overflows for h = " + std::to_string(h));
  return v;
}

/// int_{Omega_q} L((1 - x^T y)/h^2)^power f(y) omega_q(dy), in tangent-normal
/// coordinates about x. `xi_grid` integrates over Omega_{q-1}; q = 1 uses {+1, -1}.
template <class F>
double kernel_convolution(const DirectionalKernel& L, int power, double h, const UnitVector& x, F&& f, int xi_resolution = 64) {
  const int q = x.q();
  const TangentBasis basis = complete_basis(x);
  std::vector<std::vector<double>> xis;
  std::vector<double> xi_weights;
  if (q == 1) {
    xis = {{1.0}, {-1.0}};
    xi_weights = {1.0, 1.0};
  } else {
    const SphereGrid sub = build_sphere_grid(q - 1, xi_resolution);
    for (std::size_t k = 0; k < sub.size(); ++k) {
      auto n = sub.node(k);
      xis.emplace_back(n.begin(), n.end());
      xi_weights.push_back(sub.weights[k]);
    }
  }
  std::vector<std::vector<double>> directions;
  for (const auto& xi : xis) directions.push_back(basis.apply(xi));
  const double h2 = h * h;
  std::vector<double> y(q + 1);
  auto averaged = [&](double r) {
    const double t = 1.0 - h2 * r;
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    double sum = 0.0;
    for (std::size_t k = 0; k < directions.size(); ++k) {
      for (int i = 0; i <= q; ++i) y[i] = t * x[i] + s * directions[k][i];
      sum += xi_weights[k] * f(std::span<const double>(y));
    }
    return sum;
  };
  auto lp = [&](double r) { return std::pow(L(r), power); };
  return std::pow(h, q) * detail::radial_integral(lp, q, h, averaged);
}

}  // namespace dirkde
