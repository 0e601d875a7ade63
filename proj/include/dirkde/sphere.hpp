#pragma once

// Geometry of the unit q-sphere and tensor-product quadrature over it.
//
// Grids follow the tangent-normal change of variables
//   x = t*y + sqrt(1 - t^2) * B_y * xi,   omega_q(dx) = (1-t^2)^{q/2-1} dt omega_{q-1}(dxi),
// applied recursively down to the circle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dirkde/errors.hpp"
#include "dirkde/quadrature.hpp"
#include "dirkde/special.hpp"

namespace dirkde {

/// A point of the unit q-sphere embedded in R^{q+1}. Renormalized on construction.
class UnitVector {
 public:
  UnitVector() = default;
  explicit UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw DomainError("UnitVector: dimension q must be >= 1");
    double norm2 = 0.0;
    for (double c : coords_) norm2 += c * c;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("UnitVector: zero or non-finite vector");
    for (double& c : coords_) c /= norm;
  }
  UnitVector(std::initializer_list<double> coords) : UnitVector(std::vector<double>(coords)) {}

  /// Unit vector along axis `axis` of R^{q+1}.
  static UnitVector axis(int q, int axis) {
    std::vector<double> c(q + 1, 0.0);
    c.at(axis) = 1.0;
    return UnitVector(std::move(c));
  }

  int q() const { return static_cast<int>(coords_.size()) - 1; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const UnitVector& a, const UnitVector& b) {
  if (a.size() != b.size()) throw DomainError("dot: dimension mismatch");
  return dot(a.coords(), b.coords());
}

inline double surface_area(int q) {
  if (q < 1) throw DomainError("surface_area: q must be >= 1");
  return std::exp(log_surface_area(q));
}

/// Orthonormal completion B_y of y: (q+1) x q, stored column-major as q columns.
struct TangentBasis {
  UnitVector base;
  std::vector<std::vector<double>> columns;

  /// B_y * xi for xi in R^q.
  std::vector<double> apply(std::span<const double> xi) const {
    std::vector<double> out(base.size(), 0.0);
    for (std::size_t j = 0; j < columns.size(); ++j) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += columns[j][i] * xi[j];
    }
    return out;
  }
};

/// Columns 2..q+1 of the Householder reflection sending e_1 to -/+ y.
inline TangentBasis complete_basis(const UnitVector& y) {
  const std::size_t d = y.size();
  TangentBasis basis{y, {}};
  // v = y + sign(y_1) e_1 avoids cancellation; H = I - 2 v v^T / v^T v.
  std::vector<double> v(y.coords().begin(), y.coords().end());
  const double sign = y[0] >= 0.0 ? 1.0 : -1.0;
  v[0] += sign;
  const double vv = dot(v, v);
  for (std::size_t j = 1; j < d; ++j) {
    std::vector<double> col(d, 0.0);
    col[j] = 1.0;
    const double s = 2.0 * v[j] / vv;
    for (std::size_t i = 0; i < d; ++i) col[i] -= s * v[i];
    basis.columns.push_back(std::move(col));
  }
  return basis;
}

struct TangentNormal {
  double t = 0.0;
  std::vector<double> xi;
  bool degenerate = false;  // x = +/- y; xi is an arbitrary fixed direction
};

/// Decomposes x = t y + sqrt(1 - t^2) B_y xi.
inline TangentNormal tangent_normal(const UnitVector& x, const UnitVector& y, const TangentBasis& basis) {
  if (x.size() != y.size()) throw DomainError("tangent_normal: dimension mismatch");
  TangentNormal out;
  out.t = std::clamp(dot(x, y), -1.0, 1.0);
  const std::size_t q = basis.columns.size();
  out.xi.assign(q, 0.0);
  double norm2 = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    out.xi[j] = dot(basis.columns[j], x.coords());
    norm2 += out.xi[j] * out.xi[j];
  }
  const double norm = std::sqrt(norm2);
  if (norm < 1e-12) {
    std::fill(out.xi.begin(), out.xi.end(), 0.0);
    out.xi[0] = 1.0;
    out.degenerate = true;
  } else {
    for (double& c : out.xi) c /= norm;
  }
  return out;
}

inline TangentNormal tangent_normal(const UnitVector& x, const UnitVector& y) {
  return tangent_normal(x, y, complete_basis(y));
}

/// Quadrature nodes and weights on the unit q-sphere, stored flat (node k at coords[k*(q+1)]).
struct SphereGrid {
  int q = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t k) const {
    return {coords.data() + k * static_cast<std::size_t>(q + 1), static_cast<std::size_t>(q + 1)};
  }
  UnitVector unit(std::size_t k) const {
    auto n = node(k);
    return UnitVector(std::vector<double>(n.begin(), n.end()));
  }
};

namespace detail {

inline void check_grid_args(int q, int resolution) {
  if (q < 1 || q > 3) throw DomainError("sphere grid: unsupported q = " + std::to_string(q) + " (supported: 1, 2, 3)");
  if (resolution < 8) throw DomainError("sphere grid: resolution must be >= 8");
}

}  // namespace detail

/// Pole-aligned grid: t is the first coordinate (Blumenson coordinates).
/// q = 1: N-point trapezoid in angle. q >= 2: Gauss rule in t for the weight
/// (1 - t^2)^{q/2 - 1} (Legendre for q = 2, Chebyshev-U for q = 3) times a
/// recursively built Omega_{q-1} grid of the same resolution.
inline SphereGrid build_sphere_grid(int q, int resolution) {
  detail::check_grid_args(q, resolution);
  SphereGrid grid;
  grid.q = q;
  if (q == 1) {
    grid.coords.reserve(2 * resolution);
    grid.weights.assign(resolution, 2.0 * std::numbers::pi / resolution);
    for (int k = 0; k < resolution; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / resolution;
      grid.coords.push_back(std::cos(theta));
      grid.coords.push_back(std::sin(theta));
    }
    return grid;
  }
  const QuadratureRule trule = q == 2 ? gauss_legendre(resolution) : gauss_chebyshev_u(resolution);
  const SphereGrid sub = build_sphere_grid(q - 1, resolution);
  grid.coords.reserve(trule.size() * sub.size() * (q + 1));
  grid.weights.reserve(trule.size() * sub.size());
  for (std::size_t i = 0; i < trule.size(); ++i) {
    const double t = trule.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t k = 0; k < sub.size(); ++k) {
      grid.coords.push_back(t);
      for (double c : sub.node(k)) grid.coords.push_back(s * c);
      grid.weights.push_back(trule.weights[i] * sub.weights[k]);
    }
  }
  return grid;
}

/// Same construction rotated so that t = x^T pole.
inline SphereGrid build_sphere_grid(int q, int resolution, const UnitVector& pole) {
  if (pole.q() != q) throw DomainError("build_sphere_grid: pole dimension mismatch");
  SphereGrid base = build_sphere_grid(q, resolution);
  const TangentBasis basis = complete_basis(pole);
  SphereGrid grid;
  grid.q = q;
  grid.weights = base.weights;
  grid.coords.resize(base.coords.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    auto n = base.node(k);
    for (int i = 0; i <= q; ++i) {
      double v = n[0] * pole[i];
      for (int j = 0; j < q; ++j) v += basis.columns[j][i] * n[j + 1];
      grid.coords[k * (q + 1) + i] = v;
    }
  }
  return grid;
}

/// Sum_k w_k f(node_k), in node order.
template <class F>
double integrate_sphere(F&& f, const SphereGrid& grid) {
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = f(grid.node(k));
    if (!std::isfinite(v)) throw NumericError("integrate_sphere: non-finite integrand at node " + std::to_string(k));
    sum += grid.weights[k] * v;
  }
  return sum;
}

struct LineGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double center = 0.0;
  double truncation = 0.0;  // half-width of the window

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [center - truncation, center + truncation].
inline LineGrid build_line_grid(double center, double truncation, int resolution) {
  if (!(truncation > 0.0)) throw DomainError("build_line_grid: truncation must be positive");
  if (resolution < 16) throw DomainError("build_line_grid: resolution must be >= 16");
  QuadratureRule rule = gauss_legendre(resolution, center - truncation, center + truncation);
  return LineGrid{std::move(rule.nodes), std::move(rule.weights), center, truncation};
}

template <class F>
double integrate_line(F&& f, const LineGrid& grid) {
  double sum = 0.0;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double v = f(grid.nodes[l]);
    if (!std::isfinite(v)) throw NumericError("integrate_line: non-finite integrand");
    sum += grid.weights[l] * v;
  }
  return sum;
}

/// Tensor-product quadrature over Omega_q x [window]; f(node, z).
template <class F>
double integrate_sphere_line(F&& f, const SphereGrid& sgrid, const LineGrid& lgrid) {
  double sum = 0.0;
  for (std::size_t k = 0; k < sgrid.size(); ++k) {
    const auto x = sgrid.node(k);
    double inner = 0.0;
    for (std::size_t l = 0; l < lgrid.size(); ++l) {
      const double v = f(x, lgrid.nodes[l]);
      if (!std::isfinite(v)) throw NumericError("integrate_sphere_line: non-finite integrand");
      inner += lgrid.weights[l] * v;
    }
    sum += sgrid.weights[k] * inner;
  }
  return sum;
}

}  // namespace dirkde
