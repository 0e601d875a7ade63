#pragma once

// von Mises-Fisher and normal mixture targets, their bias functionals, and samplers.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dirkde/errors.hpp"
#include "dirkde/special.hpp"
#include "dirkde/sphere.hpp"

namespace dirkde {

struct VmfComponent {
  UnitVector mu;
  double kappa = 0.0;
};

struct NormalComponent {
  double m = 0.0;
  double sigma = 1.0;
};

namespace detail {

inline void check_weights(const std::vector<double>& w, std::size_t r, const char* what) {
  if (r == 0) throw DomainError(std::string(what) + ": needs at least one component");
  if (w.size() != r) throw DomainError(std::string(what) + ": weight count does not match component count");
  double s = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw DomainError(std::string(what) + ": negative weight");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw DomainError(std::string(what) + ": weights do not sum to 1");
}

inline void check_vmf(const VmfComponent& c, int q) {
  if (c.mu.q() != q) throw DomainError("mixture: components live on different spheres");
  if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa)) throw DomainError("mixture: kappa must be finite and >= 0");
}

inline void check_normal(const NormalComponent& c) {
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma) || !std::isfinite(c.m)) throw DomainError("mixture: sigma must be positive");
}

}  // namespace detail

struct DirMixture {
  std::vector<double> weights;
  std::vector<VmfComponent> components;

  std::size_t size() const { return components.size(); }
  int q() const { return components.at(0).mu.q(); }
  void validate() const {
    detail::check_weights(weights, components.size(), "DirMixture");
    for (const auto& c : components) detail::check_vmf(c, q());
  }
};

struct DirLinMixture {
  std::vector<double> weights;
  std::vector<VmfComponent> dir;
  std::vector<NormalComponent> lin;

  std::size_t size() const { return dir.size(); }
  int q() const { return dir.at(0).mu.q(); }
  DirMixture directional_part() const { return {weights, dir}; }
  void validate() const {
    detail::check_weights(weights, dir.size(), "DirLinMixture");
    if (lin.size() != dir.size()) throw DomainError("DirLinMixture: directional and linear component counts differ");
    for (const auto& c : dir) detail::check_vmf(c, q());
    for (const auto& c : lin) detail::check_normal(c);
  }
};

struct LinMixture {
  std::vector<double> weights;
  std::vector<NormalComponent> components;

  std::size_t size() const { return components.size(); }
  void validate() const {
    detail::check_weights(weights, components.size(), "LinMixture");
    for (const auto& c : components) detail::check_normal(c);
  }
};

inline double normal_pdf(double z, double m, double sigma) {
  const double u = (z - m) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double vmf_log_density(const VmfComponent& c, std::span<const double> x) {
  if (x.size() != c.mu.size()) throw DomainError("vmf_density: dimension mismatch");
  return log_cq(c.mu.q(), c.kappa) + c.kappa * dot(c.mu.coords(), x);
}

inline double vmf_density(const VmfComponent& c, std::span<const double> x) { return std::exp(vmf_log_density(c, x)); }
inline double vmf_density(const VmfComponent& c, const UnitVector& x) { return vmf_density(c, x.coords()); }

inline double mixture_density(const DirMixture& m, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) s += m.weights[j] * vmf_density(m.components[j], x);
  return s;
}
inline double mixture_density(const DirMixture& m, const UnitVector& x) { return mixture_density(m, x.coords()); }

inline double mixture_density(const DirLinMixture& m, std::span<const double> x, double z) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    s += m.weights[j] * vmf_density(m.dir[j], x) * normal_pdf(z, m.lin[j].m, m.lin[j].sigma);
  }
  return s;
}
inline double mixture_density(const DirLinMixture& m, const UnitVector& x, double z) { return mixture_density(m, x.coords(), z); }

inline double mixture_density(const LinMixture& m, double z) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) s += m.weights[j] * normal_pdf(z, m.components[j].m, m.components[j].sigma);
  return s;
}

/// Psi(f, x) for a single vMF component:
/// kappa C e^{kappa t} (-t + kappa (1 - t^2) / q), t = x^T mu.
inline double psi_term_vmf(const VmfComponent& c, std::span<const double> x) {
  if (c.kappa == 0.0) return 0.0;
  const int q = c.mu.q();
  const double t = dot(c.mu.coords(), x);
  return c.kappa * std::exp(log_cq(q, c.kappa) + c.kappa * t) * (-t + c.kappa * (1.0 - t * t) / q);
}

inline double psi_term_dir(const DirMixture& m, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) s += m.weights[j] * psi_term_vmf(m.components[j], x);
  return s;
}
inline double psi_term_dir(const DirMixture& m, const UnitVector& x) { return psi_term_dir(m, x.coords()); }

inline double psi_x_dirlin(const DirLinMixture& m, std::span<const double> x, double z) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    s += m.weights[j] * normal_pdf(z, m.lin[j].m, m.lin[j].sigma) * psi_term_vmf(m.dir[j], x);
  }
  return s;
}
inline double psi_x_dirlin(const DirLinMixture& m, const UnitVector& x, double z) { return psi_x_dirlin(m, x.coords(), z); }

/// Second z-derivative of the joint density.
inline double hz_dirlin(const DirLinMixture& m, std::span<const double> x, double z) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double sig2 = m.lin[j].sigma * m.lin[j].sigma;
    const double d = z - m.lin[j].m;
    s += m.weights[j] * vmf_density(m.dir[j], x) * normal_pdf(z, m.lin[j].m, m.lin[j].sigma) * (d * d / (sig2 * sig2) - 1.0 / sig2);
  }
  return s;
}
inline double hz_dirlin(const DirLinMixture& m, const UnitVector& x, double z) { return hz_dirlin(m, x.coords(), z); }

struct DirCurvature {
  double R_psi = 0.0;
};

struct DirLinCurvature {
  double I_psi2 = 0.0;
  double I_hz2 = 0.0;
  double I_cross = 0.0;
};

inline DirCurvature curvature_functionals(const DirMixture& m, const SphereGrid& grid) {
  if (grid.q != m.q()) throw DomainError("curvature_functionals: grid dimension mismatch");
  return {integrate_sphere([&](std::span<const double> x) { const double p = psi_term_dir(m, x); return p * p; }, grid)};
}

namespace detail {

// int phi_a(z - m_i) phi_b(z - m_j) derivatives, s^2 = a^2 + b^2, d = m_i - m_j
inline double gauss_conv0(double d, double s) { return normal_pdf(d, 0.0, s); }
inline double gauss_conv2(double d, double s) {
  const double s2 = s * s;
  return normal_pdf(d, 0.0, s) * (d * d / (s2 * s2) - 1.0 / s2);
}
inline double gauss_conv4(double d, double s) {
  const double s2 = s * s;
  const double d2 = d * d;
  return normal_pdf(d, 0.0, s) * (d2 * d2 / (s2 * s2 * s2 * s2) - 6.0 * d2 / (s2 * s2 * s2) + 3.0 / (s2 * s2));
}

}  // namespace detail

/// The z-integrals are Gaussian convolutions and are taken in closed form;
/// only the sphere part goes through the grid.
inline DirLinCurvature curvature_functionals(const DirLinMixture& m, const SphereGrid& grid) {
  if (grid.q != m.q()) throw DomainError("curvature_functionals: grid dimension mismatch");
  const std::size_t r = m.size();
  DirLinCurvature out;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const double pp = m.weights[i] * m.weights[j];
      if (pp == 0.0) continue;
      const double d = m.lin[i].m - m.lin[j].m;
      const double s = std::hypot(m.lin[i].sigma, m.lin[j].sigma);
      const double psi_psi = integrate_sphere(
          [&](std::span<const double> x) { return psi_term_vmf(m.dir[i], x) * psi_term_vmf(m.dir[j], x); }, grid);
      const double f_f = integrate_sphere(
          [&](std::span<const double> x) { return vmf_density(m.dir[i], x) * vmf_density(m.dir[j], x); }, grid);
      const double psi_f = integrate_sphere(
          [&](std::span<const double> x) { return psi_term_vmf(m.dir[i], x) * vmf_density(m.dir[j], x); }, grid);
      out.I_psi2 += pp * psi_psi * detail::gauss_conv0(d, s);
      out.I_hz2 += pp * f_f * detail::gauss_conv4(d, s);
      out.I_cross += pp * psi_f * detail::gauss_conv2(d, s);
    }
  }
  return out;
}

/// R(f'') for a normal mixture.
inline double curvature_linear(const LinMixture& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      s += m.weights[i] * m.weights[j] *
           detail::gauss_conv4(m.components[i].m - m.components[j].m, std::hypot(m.components[i].sigma, m.components[j].sigma));
    }
  }
  return s;
}

// ---------------------------------------------------------------- samples

struct DirSample {
  std::vector<UnitVector> points;

  std::size_t size() const { return points.size(); }
  int q() const { return points.at(0).q(); }
  void validate() const {
    if (points.empty()) throw DomainError("DirSample: empty sample");
    for (const auto& p : points) {
      if (p.q() != q()) throw DomainError("DirSample: mixed dimensions");
    }
  }
};

struct DirLinSample {
  std::vector<UnitVector> points;
  std::vector<double> z;

  std::size_t size() const { return points.size(); }
  int q() const { return points.at(0).q(); }
  DirSample directional_part() const { return {points}; }
  void validate() const {
    if (points.empty()) throw DomainError("DirLinSample: empty sample");
    if (z.size() != points.size()) throw DomainError("DirLinSample: directional and linear parts differ in length");
    for (const auto& p : points) {
      if (p.q() != q()) throw DomainError("DirLinSample: mixed dimensions");
    }
  }
};

using Rng = std::mt19937_64;

/// Generator for replicate `index` of a run seeded with `seed`.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

namespace detail {

inline std::vector<double> gaussian_direction(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& c : v) {
      c = normal(rng);
      n2 += c * c;
    }
  } while (n2 < 1e-300);
  const double n = std::sqrt(n2);
  for (double& c : v) c /= n;
  return v;
}

}  // namespace detail

/// One vMF draw. kappa <= 1: uniform proposal on the sphere accepted with
/// prob e^{kappa (t - 1)}. kappa > 1: the polar angle theta (t = cos theta) has density
/// prop. to e^{kappa cos theta} sin^{q-1} theta on [0, pi], dominated by
/// e^kappa theta^{q-1} e^{-2 kappa theta^2 / pi^2}, i.e. theta^2 ~ Gamma(q/2, pi^2 / (2 kappa)).
/// Acceptance stays above roughly (2/pi)^q.
inline UnitVector sample_vmf(const VmfComponent& c, Rng& rng) {
  const int q = c.mu.q();
  const double kappa = c.kappa;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (kappa <= 1.0) {
    while (true) {
      auto v = detail::gaussian_direction(q + 1, rng);
      const double t = dot(std::span<const double>(v), c.mu.coords());
      if (kappa == 0.0 || unif(rng) <= std::exp(kappa * (t - 1.0))) return UnitVector(std::move(v));
    }
  }
  std::gamma_distribution<double> gamma(0.5 * q, std::numbers::pi * std::numbers::pi / (2.0 * kappa));
  double theta = 0.0;
  while (true) {
    theta = std::sqrt(gamma(rng));
    if (theta > std::numbers::pi) continue;
    double log_acc = kappa * (std::cos(theta) - 1.0) + 2.0 * kappa * theta * theta / (std::numbers::pi * std::numbers::pi);
    if (q > 1 && theta > 0.0) log_acc += (q - 1) * std::log(std::sin(theta) / theta);
    if (std::log(unif(rng)) <= log_acc) break;
  }
  const double t = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> xi;
  if (q == 1) {
    xi = {unif(rng) < 0.5 ? 1.0 : -1.0};
  } else {
    xi = detail::gaussian_direction(q, rng);
  }
  const TangentBasis basis = complete_basis(c.mu);
  const auto tangent = basis.apply(xi);
  std::vector<double> x(q + 1);
  for (int i = 0; i <= q; ++i) x[i] = t * c.mu[i] + s * tangent[i];
  return UnitVector(std::move(x));
}

inline DirSample sample(const DirMixture& m, std::size_t n, Rng& rng, std::vector<std::size_t>* labels = nullptr) {
  m.validate();
  if (n < 1) throw DomainError("sample: n must be >= 1");
  std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
  DirSample out;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = pick(rng);
    if (labels) labels->push_back(j);
    out.points.push_back(sample_vmf(m.components[j], rng));
  }
  return out;
}

inline DirLinSample sample(const DirLinMixture& m, std::size_t n, Rng& rng, std::vector<std::size_t>* labels = nullptr) {
  m.validate();
  if (n < 1) throw DomainError("sample: n must be >= 1");
  std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  DirLinSample out;
  out.points.reserve(n);
  out.z.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = pick(rng);
    if (labels) labels->push_back(j);
    out.points.push_back(sample_vmf(m.dir[j], rng));
    out.z.push_back(m.lin[j].m + m.lin[j].sigma * normal(rng));
  }
  return out;
}

inline std::vector<double> sample(const LinMixture& m, std::size_t n, Rng& rng) {
  m.validate();
  if (n < 1) throw DomainError("sample: n must be >= 1");
  std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = pick(rng);
    out.push_back(m.components[j].m + m.components[j].sigma * normal(rng));
  }
  return out;
}

template <class Mixture>
auto sample(const Mixture& m, std::size_t n, std::uint64_t seed) {
  Rng rng = derived_rng(seed, 0);
  return sample(m, n, rng);
}

}  // namespace dirkde
