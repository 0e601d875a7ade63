#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dirkde/errors.hpp"

namespace dirkde {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  // returns P_n'(x), leaves P_n(x) in pn
  auto legendre = [n](double x, double& pn) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    pn = p1;
    return n * (x * p1 - p0) / (x * x - 1.0);
  };
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dp = legendre(x, pn);
      const double step = pn / dp;
      x -= step;
      if (std::fabs(step) < 5e-16) break;
    }
    const double dp = legendre(x, pn);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // ascending order: node i from the left is -x
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

/// n-point Gauss rule for the weight sqrt(1 - t^2) on [-1, 1] (Chebyshev, second kind).
inline QuadratureRule gauss_chebyshev_u(int n) {
  if (n < 1) throw DomainError("gauss_chebyshev_u: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 1; k <= n; ++k) {
    const double theta = std::numbers::pi * k / (n + 1.0);
    const double s = std::sin(theta);
    rule.nodes[n - k] = std::cos(theta);
    rule.weights[n - k] = std::numbers::pi / (n + 1.0) * s * s;
  }
  return rule;
}

/// Adaptive Gauss-Kronrod on a finite or semi-infinite interval.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 20) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, tol, &error);
  if (!std::isfinite(value)) throw NumericError("adaptive quadrature produced a non-finite value");
  return value;
}

/// Sum with Kahan compensation, accumulated in call order.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace dirkde
