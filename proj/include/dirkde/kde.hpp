#pragma once

// Directional and directional-linear kernel density estimators.

#include <cmath>
#include <span>
#include <vector>

#include "dirkde/errors.hpp"
#include "dirkde/kernels.hpp"
#include "dirkde/models.hpp"
#include "dirkde/quadrature.hpp"
#include "dirkde/sphere.hpp"

namespace dirkde {

struct Bandwidths {
  double h = 0.0;
  double g = 0.0;  // unused by the directional estimator

  void validate(bool need_g) const {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth h must be positive");
    if (need_g && (!(g > 0.0) || !std::isfinite(g))) throw DomainError("bandwidth g must be positive");
  }
};

/// Per-datum directional weights c_{h,q} L((1 - x^T X_i)/h^2). For the von Mises
/// kernel each one is the vMF density f_vM(x; X_i, 1/h^2), evaluated as exp(ln C + x^T X_i / h^2).
class DirectionalTerms {
 public:
  DirectionalTerms(int q, double h, DirectionalKernel L) : q_(q), h_(h), L_(std::move(L)) {
    if (!(h > 0.0)) throw DomainError("bandwidth h must be positive");
    kappa_ = 1.0 / (h * h);
    if (L_.is_von_mises()) {
      log_c_ = log_cq(q, kappa_);
    } else {
      c_ = c_hq(L_, q, h);
    }
  }

  double operator()(std::span<const double> x, std::span<const double> Xi) const {
    const double t = dot(x, Xi);
    if (L_.is_von_mises()) return std::exp(log_c_ + kappa_ * t);
    return c_ * L_((1.0 - t) * kappa_);
  }

  int q() const { return q_; }
  double h() const { return h_; }

 private:
  int q_;
  double h_;
  DirectionalKernel L_;
  double kappa_ = 0.0;
  double log_c_ = 0.0;
  double c_ = 0.0;
};

inline double linear_term(const LinearKernel& K, double g, double z, double Zi) { return K((z - Zi) / g) / g; }

inline double eval_dir(const DirSample& sample, double h, const DirectionalKernel& L, std::span<const double> x) {
  sample.validate();
  if (x.size() != static_cast<std::size_t>(sample.q() + 1)) throw DomainError("eval_dir: dimension mismatch");
  const DirectionalTerms terms(sample.q(), h, L);
  KahanSum s;
  for (const auto& Xi : sample.points) s.add(terms(x, Xi.coords()));
  return s.value() / static_cast<double>(sample.size());
}

inline double eval_dir(const DirSample& sample, double h, const DirectionalKernel& L, const UnitVector& x) {
  return eval_dir(sample, h, L, x.coords());
}

inline double eval_dirlin(const DirLinSample& sample, const Bandwidths& bw, const DirectionalKernel& L, const LinearKernel& K,
                          std::span<const double> x, double z) {
  sample.validate();
  bw.validate(true);
  if (x.size() != static_cast<std::size_t>(sample.q() + 1)) throw DomainError("eval_dirlin: dimension mismatch");
  const DirectionalTerms terms(sample.q(), bw.h, L);
  KahanSum s;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    s.add(terms(x, sample.points[i].coords()) * linear_term(K, bw.g, z, sample.z[i]));
  }
  return s.value() / static_cast<double>(sample.size());
}

inline double eval_dirlin(const DirLinSample& sample, const Bandwidths& bw, const DirectionalKernel& L, const LinearKernel& K,
                          const UnitVector& x, double z) {
  return eval_dirlin(sample, bw, L, K, x.coords(), z);
}

inline double eval_linear(std::span<const double> sample, double g, const LinearKernel& K, double z) {
  if (sample.empty()) throw DomainError("eval_linear: empty sample");
  if (!(g > 0.0)) throw DomainError("bandwidth g must be positive");
  KahanSum s;
  for (double Zi : sample) s.add(linear_term(K, g, z, Zi));
  return s.value() / static_cast<double>(sample.size());
}

/// f_hat at every sphere-grid node, same arithmetic as eval_dir.
inline std::vector<double> eval_grid(const DirSample& sample, double h, const DirectionalKernel& L, const SphereGrid& grid) {
  sample.validate();
  if (grid.q != sample.q()) throw DomainError("eval_grid: dimension mismatch");
  const DirectionalTerms terms(sample.q(), h, L);
  const double n = static_cast<double>(sample.size());
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    KahanSum s;
    for (const auto& Xi : sample.points) s.add(terms(x, Xi.coords()));
    out[k] = s.value() / n;
  }
  return out;
}

/// f_hat on the tensor grid, flattened as k * lgrid.size() + l.
inline std::vector<double> eval_grid(const DirLinSample& sample, const Bandwidths& bw, const DirectionalKernel& L, const LinearKernel& K,
                                     const SphereGrid& sgrid, const LineGrid& lgrid) {
  sample.validate();
  bw.validate(true);
  if (sgrid.q != sample.q()) throw DomainError("eval_grid: dimension mismatch");
  const DirectionalTerms terms(sample.q(), bw.h, L);
  const std::size_t n = sample.size();
  const std::size_t nl = lgrid.size();
  // B[l][i]: linear factors, shared by every sphere node
  std::vector<double> B(nl * n);
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t i = 0; i < n; ++i) B[l * n + i] = linear_term(K, bw.g, lgrid.nodes[l], sample.z[i]);
  }
  std::vector<double> A(n);
  std::vector<double> out(sgrid.size() * nl);
  for (std::size_t k = 0; k < sgrid.size(); ++k) {
    const auto x = sgrid.node(k);
    for (std::size_t i = 0; i < n; ++i) A[i] = terms(x, sample.points[i].coords());
    for (std::size_t l = 0; l < nl; ++l) {
      KahanSum s;
      const double* b = &B[l * n];
      for (std::size_t i = 0; i < n; ++i) s.add(A[i] * b[i]);
      out[k * nl + l] = s.value() / static_cast<double>(n);
    }
  }
  return out;
}

inline std::vector<double> eval_grid(std::span<const double> sample, double g, const LinearKernel& K, const LineGrid& lgrid) {
  std::vector<double> out(lgrid.size());
  for (std::size_t l = 0; l < lgrid.size(); ++l) out[l] = eval_linear(sample, g, K, lgrid.nodes[l]);
  return out;
}

}  // namespace dirkde
