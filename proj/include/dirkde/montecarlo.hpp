#pragma once

// Monte Carlo ISE oracle, exact pointwise bias/variance by quadrature, and
// the empirical normality check of the directional-linear estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "dirkde/errors.hpp"
#include "dirkde/kde.hpp"
#include "dirkde/kernels.hpp"
#include "dirkde/models.hpp"
#include "dirkde/quadrature.hpp"
#include "dirkde/sphere.hpp"

namespace dirkde {

struct McResult {
  double mean = 0.0;
  double se = 0.0;
  std::size_t replicates = 0;
};

namespace detail {

inline McResult summarize(const std::vector<double>& v) {
  const double R = static_cast<double>(v.size());
  KahanSum s;
  for (double x : v) s.add(x);
  const double mean = s.value() / R;
  KahanSum ss;
  for (double x : v) ss.add((x - mean) * (x - mean));
  return {mean, std::sqrt(ss.value() / (R - 1.0) / R), v.size()};
}

inline void check_replicates(std::size_t replicates) {
  if (replicates < 2) throw DomainError("mc_ise: need at least 2 replicates");
}

}  // namespace detail

/// Mean and standard error of ISE = int (f_hat - f)^2 over `replicates` samples of size n.
/// Replicate r draws from derived_rng(seed, r).
inline McResult mc_ise(const DirMixture& m, double h, std::size_t n, std::size_t replicates, std::uint64_t seed, const SphereGrid& grid,
                       const DirectionalKernel& L = DirectionalKernel::von_mises()) {
  detail::check_replicates(replicates);
  std::vector<double> f(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) f[k] = mixture_density(m, grid.node(k));
  std::vector<double> ise(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng = derived_rng(seed, r);
    const DirSample s = sample(m, n, rng);
    const auto fh = eval_grid(s, h, L, grid);
    KahanSum acc;
    for (std::size_t k = 0; k < grid.size(); ++k) acc.add(grid.weights[k] * (fh[k] - f[k]) * (fh[k] - f[k]));
    ise[r] = acc.value();
  }
  return detail::summarize(ise);
}

inline McResult mc_ise(const DirLinMixture& m, const Bandwidths& bw, std::size_t n, std::size_t replicates, std::uint64_t seed,
                       const SphereGrid& sgrid, const LineGrid& lgrid, const DirectionalKernel& L = DirectionalKernel::von_mises(),
                       const LinearKernel& K = LinearKernel::gaussian()) {
  detail::check_replicates(replicates);
  const std::size_t nl = lgrid.size();
  std::vector<double> f(sgrid.size() * nl);
  for (std::size_t k = 0; k < sgrid.size(); ++k) {
    for (std::size_t l = 0; l < nl; ++l) f[k * nl + l] = mixture_density(m, sgrid.node(k), lgrid.nodes[l]);
  }
  std::vector<double> ise(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng = derived_rng(seed, r);
    const DirLinSample s = sample(m, n, rng);
    const auto fh = eval_grid(s, bw, L, K, sgrid, lgrid);
    KahanSum acc;
    for (std::size_t k = 0; k < sgrid.size(); ++k) {
      double inner = 0.0;
      for (std::size_t l = 0; l < nl; ++l) {
        const double e = fh[k * nl + l] - f[k * nl + l];
        inner += lgrid.weights[l] * e * e;
      }
      acc.add(sgrid.weights[k] * inner);
    }
    ise[r] = acc.value();
  }
  return detail::summarize(ise);
}

inline McResult mc_ise(const LinMixture& m, double g, std::size_t n, std::size_t replicates, std::uint64_t seed, const LineGrid& lgrid,
                       const LinearKernel& K = LinearKernel::gaussian()) {
  detail::check_replicates(replicates);
  std::vector<double> f(lgrid.size());
  for (std::size_t l = 0; l < lgrid.size(); ++l) f[l] = mixture_density(m, lgrid.nodes[l]);
  std::vector<double> ise(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng = derived_rng(seed, r);
    const auto s = sample(m, n, rng);
    const auto fh = eval_grid(s, g, K, lgrid);
    KahanSum acc;
    for (std::size_t l = 0; l < lgrid.size(); ++l) acc.add(lgrid.weights[l] * (fh[l] - f[l]) * (fh[l] - f[l]));
    ise[r] = acc.value();
  }
  return detail::summarize(ise);
}

/// Window [min m - 8 max sigma - 8 g, max m + 8 max sigma + 8 g].
inline LineGrid line_grid_for(const std::vector<NormalComponent>& lin, double g, int resolution) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double smax = 0.0;
  for (const auto& c : lin) {
    lo = std::min(lo, c.m);
    hi = std::max(hi, c.m);
    smax = std::max(smax, c.sigma);
  }
  lo -= 8.0 * smax + 8.0 * g;
  hi += 8.0 * smax + 8.0 * g;
  return build_line_grid(0.5 * (lo + hi), 0.5 * (hi - lo), resolution);
}

/// Enough Gauss-Legendre nodes that the narrowest Gaussian in play (sd
/// min(g, sigma)/sqrt 2 after squaring) is resolved on the whole window.
inline int line_resolution_for(const std::vector<NormalComponent>& lin, double g, int minimum = 128) {
  double smin = g;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double smax = 0.0;
  for (const auto& c : lin) {
    smin = std::min(smin, c.sigma);
    smax = std::max(smax, c.sigma);
    lo = std::min(lo, c.m);
    hi = std::max(hi, c.m);
  }
  const double width = hi - lo + 16.0 * smax + 16.0 * g;
  return std::max(minimum, static_cast<int>(std::ceil(3.0 * width / smin)));
}

struct PointwiseBiasVar {
  double density = 0.0;
  double expectation = 0.0;
  double exact_bias = 0.0;
  double abias = 0.0;
  double exact_var = 0.0;
  double avar = 0.0;
};

/// Exact moments E[c L] and E[c^2 L^2] by tangent-normal quadrature about x.
inline PointwiseBiasVar pointwise_bias_var(const DirMixture& m, const UnitVector& x, double h, double n, const DirectionalKernel& L,
                                           const KernelConstants& kc, int xi_resolution = 64) {
  if (!(h > 0.0)) throw DomainError("pointwise_bias_var: h must be positive");
  const int q = x.q();
  const double c = c_hq(L, q, h);
  auto f = [&](std::span<const double> y) { return mixture_density(m, y); };
  PointwiseBiasVar out;
  out.density = mixture_density(m, x);
  out.expectation = c * kernel_convolution(L, 1, h, x, f, xi_resolution);
  const double second = c * c * kernel_convolution(L, 2, h, x, f, xi_resolution);
  out.exact_bias = out.expectation - out.density;
  out.abias = kc.b_q * psi_term_dir(m, x) * h * h;
  out.exact_var = (second - out.expectation * out.expectation) / n;
  out.avar = c * kc.d_q * out.density / n;
  return out;
}

namespace detail {

// int K((z - t)/g)^power / g^power phi_sigma(t - m) dt
inline double linear_moment(const LinearKernel& K, int power, double g, double z, const NormalComponent& c) {
  if (K.is_gaussian()) {
    if (power == 1) return normal_pdf(z, c.m, std::sqrt(g * g + c.sigma * c.sigma));
    return normal_pdf(z, c.m, std::sqrt(0.5 * g * g + c.sigma * c.sigma)) / (2.0 * std::sqrt(std::numbers::pi) * g);
  }
  auto integrand = [&](double v) { return std::pow(K(v), power) * normal_pdf(z - g * v, c.m, c.sigma); };
  constexpr double inf = std::numeric_limits<double>::infinity();
  return integrate_adaptive(integrand, -inf, inf, 1e-12) / std::pow(g, power - 1);
}

}  // namespace detail

inline PointwiseBiasVar pointwise_bias_var(const DirLinMixture& m, const UnitVector& x, double z, const Bandwidths& bw, double n,
                                           const DirectionalKernel& L, const LinearKernel& K, const KernelConstants& kc,
                                           int xi_resolution = 64) {
  bw.validate(true);
  const int q = x.q();
  const double c = c_hq(L, q, bw.h);
  PointwiseBiasVar out;
  out.density = mixture_density(m, x, z);
  double first = 0.0;
  double second = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto& comp = m.dir[j];
    auto fj = [&](std::span<const double> y) { return vmf_density(comp, y); };
    const double d1 = c * kernel_convolution(L, 1, bw.h, x, fj, xi_resolution);
    const double d2 = c * c * kernel_convolution(L, 2, bw.h, x, fj, xi_resolution);
    first += m.weights[j] * d1 * detail::linear_moment(K, 1, bw.g, z, m.lin[j]);
    second += m.weights[j] * d2 * detail::linear_moment(K, 2, bw.g, z, m.lin[j]);
  }
  out.expectation = first;
  out.exact_bias = first - out.density;
  out.abias = kc.b_q * psi_x_dirlin(m, x, z) * bw.h * bw.h + 0.5 * kc.mu2_K * hz_dirlin(m, x, z) * bw.g * bw.g;
  out.exact_var = (second - first * first) / n;
  out.avar = c * kc.d_q * kc.R_K * out.density / (n * bw.g);
  return out;
}

/// P(sqrt(N) D > t) in the large-N limit, with the usual finite-N argument correction.
inline double kolmogorov_pvalue(double D, std::size_t N) {
  const double sn = std::sqrt(static_cast<double>(N));
  const double t = (sn + 0.12 + 0.11 / sn) * D;
  if (t < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// One-sample KS statistic against N(0, 1).
inline double ks_statistic_normal(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double N = static_cast<double>(v.size());
  double D = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = standard_normal_cdf(v[i]);
    D = std::max({D, (i + 1.0) / N - F, F - i / N});
  }
  return D;
}

enum class Centering {
  Asymptotic,  // f + ABias, variance R(K) d_q f / (lambda_q h^q g n)
  Exact,       // exact E f_hat and Var f_hat by quadrature
};

struct NormalityResult {
  double ks_statistic = 0.0;
  double p_value = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> standardized;
};

/// Standardized f_hat(x, z) over independent replicates, compared with N(0, 1).
inline NormalityResult normality_check(const DirLinMixture& m, const UnitVector& x, double z, const Bandwidths& bw, std::size_t n,
                                       std::size_t replicates, std::uint64_t seed, Centering centering = Centering::Asymptotic,
                                       const DirectionalKernel& L = DirectionalKernel::von_mises(),
                                       const LinearKernel& K = LinearKernel::gaussian()) {
  if (n < 2) throw DomainError("normality_check: needs n >= 2");
  if (replicates < 2) throw DomainError("normality_check: needs at least 2 replicates");
  bw.validate(true);
  const int q = x.q();
  const KernelConstants kc = kernel_constants(L, K, q);
  const PointwiseBiasVar pv = pointwise_bias_var(m, x, z, bw, static_cast<double>(n), L, K, kc);
  double center = 0.0;
  double scale = 0.0;
  if (centering == Centering::Asymptotic) {
    center = pv.density + pv.abias;
    scale = std::sqrt(kc.R_K * kc.d_q * pv.density / (kc.lambda_q * std::pow(bw.h, q) * bw.g * static_cast<double>(n)));
  } else {
    center = pv.expectation;
    scale = std::sqrt(pv.exact_var);
  }
  NormalityResult out;
  out.standardized.resize(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng = derived_rng(seed, r);
    const DirLinSample s = sample(m, n, rng);
    out.standardized[r] = (eval_dirlin(s, bw, L, K, x, z) - center) / scale;
  }
  KahanSum s;
  for (double v : out.standardized) s.add(v);
  out.mean = s.value() / static_cast<double>(replicates);
  KahanSum ss;
  for (double v : out.standardized) ss.add((v - out.mean) * (v - out.mean));
  out.sd = std::sqrt(ss.value() / static_cast<double>(replicates - 1));
  out.ks_statistic = ks_statistic_normal(out.standardized);
  out.p_value = kolmogorov_pvalue(out.ks_statistic, replicates);
  return out;
}

}  // namespace dirkde
