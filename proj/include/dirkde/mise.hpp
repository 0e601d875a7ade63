#pragma once

// Exact and bootstrap MISE for von Mises(-normal) mixture targets estimated
// with the von Mises (x Gaussian) kernel.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "dirkde/errors.hpp"
#include "dirkde/models.hpp"
#include "dirkde/quadrature.hpp"
#include "dirkde/special.hpp"
#include "dirkde/sphere.hpp"

namespace dirkde {

/// Dense row-major square matrix.
struct SquareMatrix {
  std::size_t r = 0;
  std::vector<double> data;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : r(n), data(n * n, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * r + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * r + j]; }
};

/// sum_ij p_i M_ij p_j.
inline double quadratic_form(std::span<const double> p, const SquareMatrix& M) {
  KahanSum s;
  for (std::size_t i = 0; i < M.r; ++i) {
    for (std::size_t j = 0; j < M.r; ++j) s.add(p[i] * M(i, j) * p[j]);
  }
  return s.value();
}

struct PsiMatrices {
  SquareMatrix psi0;
  SquareMatrix psi1;
  SquareMatrix psi2;
  double h = 0.0;
};

struct OmegaMatrices {
  SquareMatrix omega0;
  SquareMatrix omega1;
  SquareMatrix omega2;
  double g = 0.0;
};

namespace detail {

inline double norm_of_sum(const VmfComponent& a, const VmfComponent& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.mu.size(); ++k) {
    const double v = a.kappa * a.mu[k] + b.kappa * b.mu[k];
    s += v * v;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Psi_0, Psi_1, Psi_2 with entries
///   Psi_0 = C(k_i) C(k_j) / C(||k_i mu_i + k_j mu_j||)
///   Psi_1 = C(a) C(k_i) C(k_j) int e^{k_j x^T mu_j} / C(||a x + k_i mu_i||) dx
///   Psi_2 = C(a)^2 C(k_i) C(k_j) int 1 / (C(||a x + k_i mu_i||) C(||a x + k_j mu_j||)) dx
/// a = 1/h^2. Integrands are assembled in log space, so only the products
/// (which are bounded by the component densities) ever leave it.
inline PsiMatrices psi_matrices(const std::vector<VmfComponent>& comps, double h, const SphereGrid& grid) {
  if (!(h > 0.0)) throw DomainError("psi_matrices: h must be positive");
  if (comps.empty()) throw DomainError("psi_matrices: no components");
  const int q = grid.q;
  for (const auto& c : comps) {
    if (c.mu.q() != q) throw DomainError("psi_matrices: grid dimension mismatch");
  }
  const std::size_t r = comps.size();
  const std::size_t N = grid.size();
  const double a = 1.0 / (h * h);
  const double lca = log_cq(q, a);
  std::vector<double> lck(r);
  for (std::size_t i = 0; i < r; ++i) lck[i] = log_cq(q, comps[i].kappa);

  PsiMatrices out{SquareMatrix(r), SquareMatrix(r), SquareMatrix(r), h};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i; j < r; ++j) {
      const double v = std::exp(lck[i] + lck[j] - log_cq(q, detail::norm_of_sum(comps[i], comps[j])));
      out.psi0(i, j) = v;
      out.psi0(j, i) = v;
    }
  }

  // lr[i][k] = ln C(||a x_k + k_i mu_i||), et[j][k] = k_j x_k^T mu_j
  std::vector<double> lr(r * N);
  std::vector<double> et(r * N);
  for (std::size_t i = 0; i < r; ++i) {
    const auto& c = comps[i];
    for (std::size_t k = 0; k < N; ++k) {
      const auto x = grid.node(k);
      double s = 0.0;
      for (int d = 0; d <= q; ++d) {
        const double v = a * x[d] + c.kappa * c.mu[d];
        s += v * v;
      }
      lr[i * N + k] = log_cq(q, std::sqrt(s));
      et[i * N + k] = c.kappa * dot(c.mu.coords(), x);
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const double base = lca + lck[i] + lck[j];
      KahanSum s;
      for (std::size_t k = 0; k < N; ++k) s.add(grid.weights[k] * std::exp(base + et[j * N + k] - lr[i * N + k]));
      out.psi1(i, j) = s.value();
    }
    for (std::size_t j = i; j < r; ++j) {
      const double base = 2.0 * lca + lck[i] + lck[j];
      KahanSum s;
      for (std::size_t k = 0; k < N; ++k) s.add(grid.weights[k] * std::exp(base - lr[i * N + k] - lr[j * N + k]));
      out.psi2(i, j) = s.value();
      out.psi2(j, i) = s.value();
    }
  }
  return out;
}

inline PsiMatrices psi_matrices(const DirMixture& m, double h, const SphereGrid& grid) { return psi_matrices(m.components, h, grid); }

/// Largest relative change of any Psi entry between `resolution` and 2 * `resolution`.
inline double psi_refinement_change(const std::vector<VmfComponent>& comps, double h, int q, int resolution) {
  const PsiMatrices coarse = psi_matrices(comps, h, build_sphere_grid(q, resolution));
  const PsiMatrices fine = psi_matrices(comps, h, build_sphere_grid(q, 2 * resolution));
  double worst = 0.0;
  auto compare = [&](const SquareMatrix& c, const SquareMatrix& f) {
    for (std::size_t k = 0; k < c.data.size(); ++k) {
      if (f.data[k] != 0.0) worst = std::max(worst, std::fabs(c.data[k] - f.data[k]) / std::fabs(f.data[k]));
    }
  };
  compare(coarse.psi1, fine.psi1);
  compare(coarse.psi2, fine.psi2);
  return worst;
}

inline OmegaMatrices omega_matrices(const std::vector<NormalComponent>& comps, double g) {
  if (!(g > 0.0)) throw DomainError("omega_matrices: g must be positive");
  const std::size_t r = comps.size();
  OmegaMatrices out{SquareMatrix(r), SquareMatrix(r), SquareMatrix(r), g};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const double s2 = comps[i].sigma * comps[i].sigma + comps[j].sigma * comps[j].sigma;
      const double d = comps[i].m - comps[j].m;
      out.omega0(i, j) = normal_pdf(d, 0.0, std::sqrt(s2));
      out.omega1(i, j) = normal_pdf(d, 0.0, std::sqrt(g * g + s2));
      out.omega2(i, j) = normal_pdf(d, 0.0, std::sqrt(2.0 * g * g + s2));
    }
  }
  return out;
}

/// The integrated-variance term is D_q(h) / n: int f_vM(x; y, 1/h^2)^2 dx = C(a)^2 / C(2a) = D_q(h).
struct MiseTerms {
  double variance = 0.0;         // integrated variance leading term
  double integrated_bias = 0.0;  // quadratic form
  double total() const { return variance + integrated_bias; }
};

namespace detail {

inline void check_n(double n) {
  if (!(n >= 1.0)) throw DomainError("sample size n must be >= 1");
}

inline SquareMatrix combine(const SquareMatrix& m2, const SquareMatrix& m1, const SquareMatrix& m0, double n) {
  SquareMatrix out(m0.r);
  const double w2 = 1.0 - 1.0 / n;
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] = w2 * m2.data[k] - 2.0 * m1.data[k] + m0.data[k];
  return out;
}

inline SquareMatrix hadamard(const SquareMatrix& a, const SquareMatrix& b) {
  SquareMatrix out(a.r);
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] = a.data[k] * b.data[k];
  return out;
}

}  // namespace detail

inline MiseTerms exact_mise_linear_terms(const LinMixture& m, double g, double n) {
  m.validate();
  detail::check_n(n);
  const OmegaMatrices om = omega_matrices(m.components, g);
  return {1.0 / (2.0 * std::sqrt(std::numbers::pi) * g * n),
          quadratic_form(m.weights, detail::combine(om.omega2, om.omega1, om.omega0, n))};
}

/// Gaussian-kernel estimator of a normal mixture.
inline double exact_mise_linear(const LinMixture& m, double g, double n) { return exact_mise_linear_terms(m, g, n).total(); }

inline MiseTerms exact_mise_dir_terms(const DirMixture& m, double h, double n, const SphereGrid& grid) {
  m.validate();
  detail::check_n(n);
  const PsiMatrices ps = psi_matrices(m, h, grid);
  return {dq_factor(grid.q, h) / n, quadratic_form(m.weights, detail::combine(ps.psi2, ps.psi1, ps.psi0, n))};
}

/// Von Mises-kernel estimator of a vMF mixture.
inline double exact_mise_dir(const DirMixture& m, double h, double n, const SphereGrid& grid) {
  return exact_mise_dir_terms(m, h, n, grid).total();
}

inline MiseTerms exact_mise_dirlin_terms(const DirLinMixture& m, double h, double g, double n, const SphereGrid& grid) {
  m.validate();
  detail::check_n(n);
  const PsiMatrices ps = psi_matrices(m.dir, h, grid);
  const OmegaMatrices om = omega_matrices(m.lin, g);
  const SquareMatrix M = detail::combine(detail::hadamard(ps.psi2, om.omega2), detail::hadamard(ps.psi1, om.omega1),
                                         detail::hadamard(ps.psi0, om.omega0), n);
  return {dq_factor(grid.q, h) / (2.0 * std::sqrt(std::numbers::pi) * g * n), quadratic_form(m.weights, M)};
}

/// Von Mises x Gaussian product-kernel estimator of a vMF-normal mixture.
inline double exact_mise_dirlin(const DirLinMixture& m, double h, double g, double n, const SphereGrid& grid) {
  return exact_mise_dirlin_terms(m, h, g, n, grid).total();
}

/// Equal-weight mixture of vM(X_i, 1/hp^2): the smooth-bootstrap reference density.
inline DirMixture empirical_mixture(const DirSample& s, double hp) {
  s.validate();
  if (!(hp > 0.0)) throw DomainError("pilot bandwidth must be positive");
  DirMixture m;
  const double n = static_cast<double>(s.size());
  for (const auto& x : s.points) {
    m.weights.push_back(1.0 / n);
    m.components.push_back({x, 1.0 / (hp * hp)});
  }
  return m;
}

inline DirLinMixture empirical_mixture(const DirLinSample& s, double hp, double gp) {
  s.validate();
  if (!(hp > 0.0) || !(gp > 0.0)) throw DomainError("pilot bandwidths must be positive");
  const DirMixture d = empirical_mixture(s.directional_part(), hp);
  DirLinMixture m{d.weights, d.components, {}};
  for (double z : s.z) m.lin.push_back({z, gp});
  return m;
}

namespace detail {

inline double sum_entries(const SquareMatrix& M) {
  KahanSum s;
  for (double v : M.data) s.add(v);
  return s.value();
}

}  // namespace detail

/// Closed-form bootstrap MISE, n^{-2} 1^T[...]1 over the empirical mixture.
inline double bootstrap_mise_dir(const DirSample& s, double h, double hp, const SphereGrid& grid) {
  const DirMixture m = empirical_mixture(s, hp);
  const double n = static_cast<double>(s.size());
  const PsiMatrices ps = psi_matrices(m.components, h, grid);
  return dq_factor(grid.q, h) / n + detail::sum_entries(detail::combine(ps.psi2, ps.psi1, ps.psi0, n)) / (n * n);
}

inline double bootstrap_mise_dirlin(const DirLinSample& s, double h, double g, double hp, double gp, const SphereGrid& grid) {
  const DirLinMixture m = empirical_mixture(s, hp, gp);
  const double n = static_cast<double>(s.size());
  const PsiMatrices ps = psi_matrices(m.dir, h, grid);
  const OmegaMatrices om = omega_matrices(m.lin, g);
  const SquareMatrix M = detail::combine(detail::hadamard(ps.psi2, om.omega2), detail::hadamard(ps.psi1, om.omega1),
                                         detail::hadamard(ps.psi0, om.omega0), n);
  return dq_factor(grid.q, h) / (2.0 * std::sqrt(std::numbers::pi) * g * n) + detail::sum_entries(M) / (n * n);
}

/// Gaussian linear analogue, for completeness of the risk sweeps.
inline double bootstrap_mise_linear(std::span<const double> s, double g, double gp) {
  if (s.empty()) throw DomainError("bootstrap_mise_linear: empty sample");
  LinMixture m;
  const double n = static_cast<double>(s.size());
  for (double z : s) {
    m.weights.push_back(1.0 / n);
    m.components.push_back({z, gp});
  }
  const OmegaMatrices om = omega_matrices(m.components, g);
  return 1.0 / (2.0 * std::sqrt(std::numbers::pi) * g * n) + detail::sum_entries(detail::combine(om.omega2, om.omega1, om.omega0, n)) / (n * n);
}

}  // namespace dirkde
