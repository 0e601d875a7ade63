#pragma once

// Asymptotic MISE and its minimizers. The variance terms use the leading
// order c_{h,q}(L) ~ 1 / (lambda_q(L) h^q), which is the form whose minimizers
// are the closed-form bandwidths below.

#include <array>
#include <cmath>
#include <string>

#include "dirkde/errors.hpp"
#include "dirkde/kernels.hpp"
#include "dirkde/models.hpp"
#include "dirkde/optimize.hpp"

namespace dirkde {

/// b_q^2 R(Psi) h^4 + d_q / (lambda_q h^q n).
inline double amise_dir(const KernelConstants& kc, double R_psi, double h, double n) {
  if (!(h > 0.0)) throw DomainError("amise_dir: h must be positive");
  return kc.b_q * kc.b_q * R_psi * std::pow(h, 4) + kc.d_q / (kc.lambda_q * std::pow(h, kc.q) * n);
}

inline double amise_dir_derivative(const KernelConstants& kc, double R_psi, double h, double n) {
  return 4.0 * kc.b_q * kc.b_q * R_psi * std::pow(h, 3) - kc.q * kc.d_q / (kc.lambda_q * std::pow(h, kc.q + 1) * n);
}

inline double amise_dir(const DirMixture& m, double h, double n, const KernelConstants& kc, const SphereGrid& grid) {
  return amise_dir(kc, curvature_functionals(m, grid).R_psi, h, n);
}

/// [q d_q / (4 b_q^2 lambda_q R(Psi) n)]^{1/(4+q)}.
inline double h_amise_dir(const KernelConstants& kc, double R_psi, double n) {
  if (!(R_psi > 0.0)) throw DegenerateError("AMISE has no finite minimizer: R(Psi) = 0 (uniform target)");
  const int q = kc.q;
  return std::pow(q * kc.d_q / (4.0 * kc.b_q * kc.b_q * kc.lambda_q * R_psi * n), 1.0 / (4.0 + q));
}

inline double h_amise_dir(const DirMixture& m, double n, const KernelConstants& kc, const SphereGrid& grid) {
  return h_amise_dir(kc, curvature_functionals(m, grid).R_psi, n);
}

struct AmiseCoefficients {
  double A = 0.0;  // h^4
  double B = 0.0;  // g^4
  double C = 0.0;  // h^2 g^2
  double V = 0.0;  // numerator of the variance term, over h^q g n
};

inline AmiseCoefficients amise_coefficients(const KernelConstants& kc, const DirLinCurvature& cv) {
  return {kc.b_q * kc.b_q * cv.I_psi2, 0.25 * kc.mu2_K * kc.mu2_K * cv.I_hz2, kc.b_q * kc.mu2_K * cv.I_cross,
          kc.d_q * kc.R_K / kc.lambda_q};
}

/// A h^4 + B g^4 + C h^2 g^2 + d_q R(K) / (lambda_q n h^q g).
inline double amise_dirlin(const KernelConstants& kc, const DirLinCurvature& cv, double h, double g, double n) {
  if (!(h > 0.0) || !(g > 0.0)) throw DomainError("amise_dirlin: bandwidths must be positive");
  const auto c = amise_coefficients(kc, cv);
  const double h2 = h * h;
  const double g2 = g * g;
  return c.A * h2 * h2 + c.B * g2 * g2 + c.C * h2 * g2 + c.V / (n * std::pow(h, kc.q) * g);
}

inline double amise_dirlin(const DirLinMixture& m, double h, double g, double n, const KernelConstants& kc, const SphereGrid& grid) {
  return amise_dirlin(kc, curvature_functionals(m, grid), h, g, n);
}

struct BandwidthPair {
  double h = 0.0;
  double g = 0.0;
  double beta = 0.0;  // g / h of the closed form (starting point when q > 1)
  int iterations = 0;
  bool converged = true;
};

/// g = beta h at the stationary point. The two stationarity equations give
/// 4 q B beta^4 + 2 (q - 1) C beta^2 - 4 A = 0, i.e. beta = (A/B)^{1/4} for q = 1.
inline double amise_beta(const AmiseCoefficients& c, int q) {
  if (!(c.A > 0.0) || !(c.B > 0.0)) throw DegenerateError("AMISE has no finite minimizer: a curvature functional vanishes");
  if (q == 1) return std::pow(c.A / c.B, 0.25);
  const double qq = q;
  const double b = 2.0 * (qq - 1.0) * c.C;
  const double u = (-b + std::sqrt(b * b + 64.0 * qq * c.A * c.B)) / (8.0 * qq * c.B);
  return std::sqrt(u);
}

/// h^{5+q} = (q+1) V / (4 beta n (A + B beta^4 + C beta^2)).
inline double amise_h_given_beta(const AmiseCoefficients& c, int q, double beta, double n) {
  const double b2 = beta * beta;
  const double bias = c.A + c.B * b2 * b2 + c.C * b2;
  if (!(bias > 0.0)) throw DegenerateError("AMISE bias coefficient is not positive along g = beta h");
  return std::pow((q + 1.0) * c.V / (4.0 * beta * n * bias), 1.0 / (5.0 + q));
}

/// q = 1: closed form. q > 1: Nelder-Mead in (ln h, ln g) started at the closed form.
inline BandwidthPair hg_amise_dirlin(const KernelConstants& kc, const DirLinCurvature& cv, double n, double tol = 1e-12, int max_iter = 500) {
  const auto c = amise_coefficients(kc, cv);
  const int q = kc.q;
  BandwidthPair out;
  out.beta = amise_beta(c, q);
  out.h = amise_h_given_beta(c, q, out.beta, n);
  out.g = out.beta * out.h;
  if (q == 1) return out;
  auto f = [&](const std::array<double, 2>& p) { return std::log(amise_dirlin(kc, cv, std::exp(p[0]), std::exp(p[1]), n)); };
  const Minimum2d m = minimize_2d(f, {std::log(out.h), std::log(out.g)}, tol, max_iter, 0.05);
  if (!m.converged) {
    throw NumericError("hg_amise_dirlin: Nelder-Mead did not converge in " + std::to_string(max_iter) +
                       " iterations (best h = " + std::to_string(std::exp(m.x[0])) + ", g = " + std::to_string(std::exp(m.x[1])) + ")");
  }
  out.h = std::exp(m.x[0]);
  out.g = std::exp(m.x[1]);
  out.iterations = m.iterations;
  return out;
}

inline BandwidthPair hg_amise_dirlin(const DirLinMixture& m, double n, const KernelConstants& kc, const SphereGrid& grid) {
  return hg_amise_dirlin(kc, curvature_functionals(m, grid), n);
}

/// Linear: 1/4 mu_2(K)^2 R(f'') g^4 + R(K) / (n g).
inline double amise_linear(const KernelConstants& kc, double R_f2, double g, double n) {
  if (!(g > 0.0)) throw DomainError("amise_linear: g must be positive");
  return 0.25 * kc.mu2_K * kc.mu2_K * R_f2 * std::pow(g, 4) + kc.R_K / (n * g);
}

inline double g_amise_linear(const KernelConstants& kc, double R_f2, double n) {
  if (!(R_f2 > 0.0)) throw DegenerateError("AMISE has no finite minimizer: R(f'') = 0");
  return std::pow(kc.R_K / (kc.mu2_K * kc.mu2_K * R_f2 * n), 0.2);
}

}  // namespace dirkde
