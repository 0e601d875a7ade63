#pragma once

// Golden-section and Nelder-Mead minimizers for bandwidth selection.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "dirkde/errors.hpp"

namespace dirkde {

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Golden-section search on [lo, hi]; f is assumed unimodal there.
template <class F>
ScalarMinimum minimize_scalar(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 500) {
  if (!(lo < hi)) throw DomainError("minimize_scalar: need lo < hi");
  if (!(tol > 0.0)) throw DomainError("minimize_scalar: tol must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  ScalarMinimum out;
  int it = 0;
  while (b - a > tol && it < max_iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  out.iterations = it;
  out.converged = b - a <= tol;
  out.x = fc < fd ? c : d;
  out.fx = std::min(fc, fd);
  return out;
}

struct Minimum2d {
  std::array<double, 2> x{};
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead on R^2 (standard coefficients 1, 2, 1/2, 1/2). Stops when the
/// simplex diameter drops below tol or after max_iter iterations; the best
/// vertex is returned either way.
template <class F>
Minimum2d minimize_2d(F&& f, std::array<double, 2> start, double tol = 1e-10, int max_iter = 500, double step = 0.1) {
  using P = std::array<double, 2>;
  std::array<P, 3> v{start, P{start[0] + step, start[1]}, P{start[0], start[1] + step}};
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  auto order = [&] {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return fv[i] < fv[j]; });
    std::array<P, 3> nv{v[idx[0]], v[idx[1]], v[idx[2]]};
    std::array<double, 3> nf{fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    v = nv;
    fv = nf;
  };
  auto diameter = [&] {
    double d = 0.0;
    for (int i = 1; i < 3; ++i) d = std::max(d, std::hypot(v[i][0] - v[0][0], v[i][1] - v[0][1]));
    return d;
  };
  auto lerp = [](const P& a, const P& b, double t) { return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}; };
  Minimum2d out;
  int it = 0;
  order();
  while (it < max_iter && diameter() > tol) {
    ++it;
    const P centroid{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    const P xr = lerp(centroid, v[2], -1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const P xe = lerp(centroid, v[2], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
    } else {
      const bool outside = fr < fv[2];
      const P xc = outside ? lerp(centroid, xr, 0.5) : lerp(centroid, v[2], 0.5);
      const double fcon = f(xc);
      if (fcon < (outside ? fr : fv[2])) {
        v[2] = xc;
        fv[2] = fcon;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i] = lerp(v[0], v[i], 0.5);
          fv[i] = f(v[i]);
        }
      }
    }
    order();
  }
  out.x = v[0];
  out.fx = fv[0];
  out.iterations = it;
  out.converged = diameter() <= tol;
  return out;
}

}  // namespace dirkde
