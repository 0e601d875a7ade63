#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "dirkde/kde.hpp"
#include "test_support.hpp"

using namespace dirkde;
using testing_support::mixtdir;
using testing_support::mixtdirlin;

namespace {

const DirectionalKernel kVm = DirectionalKernel::von_mises();
const LinearKernel kGauss = LinearKernel::gaussian();

UnitVector random_unit(int q, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> v(q + 1);
  for (double& c : v) c = nd(rng);
  return UnitVector(v);
}

}  // namespace

TEST(EvalDir, SinglePointIsVmfBump) {
  const UnitVector mu{0.0, 0.0, 1.0};
  const DirSample s{{mu}};
  std::mt19937_64 rng(1);
  for (double h : {0.1, 0.4, 1.0}) {
    const VmfComponent bump{mu, 1.0 / (h * h)};
    for (int k = 0; k < 5; ++k) {
      const UnitVector x = random_unit(2, rng);
      EXPECT_NEAR(eval_dir(s, h, kVm, x) / vmf_density(bump, x), 1.0, 1e-12);
    }
  }
}

TEST(EvalDir, MatchesVmfMixtureForm) {
  const auto s = sample(mixtdir(2), 30, 4);
  const double h = 0.35;
  const UnitVector x{0.3, 0.3, -0.9};
  double mix = 0.0;
  for (const auto& p : s.points) mix += vmf_density(VmfComponent{p, 1.0 / (h * h)}, x) / 30.0;
  EXPECT_NEAR(eval_dir(s, h, kVm, x) / mix, 1.0, 1e-12);
}

TEST(EvalDir, Normalized) {
  const std::pair<int, int> cases[] = {{1, 512}, {2, 128}, {3, 48}};
  for (auto [q, res] : cases) {
    const auto s = sample(mixtdir(q), 100, 7);
    const auto grid = build_sphere_grid(q, res);
    for (double h : {0.25, 0.6}) {
      const auto v = eval_grid(s, h, kVm, grid);
      double total = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) total += grid.weights[k] * v[k];
      EXPECT_NEAR(total, 1.0, 1e-6) << q << " " << h;
    }
  }
}

TEST(EvalDir, LargeBandwidthIsUniform) {
  const auto s = sample(mixtdir(2), 40, 8);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(eval_dir(s, 100.0, kVm, random_unit(2, rng)), 1.0 / (4.0 * std::numbers::pi), 1e-4);
}

TEST(EvalDir, RotationEquivariant) {
  const auto s = sample(mixtdir(2), 50, 12);
  const double c = std::cos(1.1), sn = std::sin(1.1);
  auto rot = [&](const UnitVector& u) { return UnitVector{c * u[0] + sn * u[2], u[1], -sn * u[0] + c * u[2]}; };
  DirSample r;
  for (const auto& p : s.points) r.points.push_back(rot(p));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const UnitVector x = random_unit(2, rng);
    const double a = eval_dir(s, 0.3, kVm, x);
    EXPECT_NEAR(eval_dir(r, 0.3, kVm, rot(x)), a, 1e-12 * std::max(1.0, a));
  }
}

TEST(EvalDir, Errors) {
  const DirSample s{{UnitVector{1.0, 0.0}}};
  EXPECT_THROW(eval_dir(s, 0.0, kVm, UnitVector{1.0, 0.0}), DomainError);
  EXPECT_THROW(eval_dir(s, 0.5, kVm, UnitVector{1.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(eval_dir(DirSample{}, 0.5, kVm, UnitVector{1.0, 0.0}), DomainError);
}

TEST(EvalDir, CustomKernelQuadratureNormalization) {
  // Epanechnikov-like profile; c_{h,q} comes from quadrature
  const auto L = DirectionalKernel::custom([](double r) { return r < 1.0 ? 1.0 - r : 0.0; }, 1);
  const auto s = sample(mixtdir(1), 60, 13);
  const auto grid = build_sphere_grid(1, 4096);
  const auto v = eval_grid(s, 0.4, L, grid);
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    EXPECT_GE(v[k], 0.0);
    total += grid.weights[k] * v[k];
  }
  EXPECT_NEAR(total, 1.0, 1e-4);
}

TEST(EvalDir, PointwiseConsistency) {
  // vM(mu, 2) on the circle, h = n^{-1/5}; mean abs error at 8 points over 50 seeds
  const DirMixture target{{1.0}, {{UnitVector{1.0, 0.0}, 2.0}}};
  std::vector<UnitVector> pts;
  for (int k = 0; k < 8; ++k) pts.emplace_back(std::initializer_list<double>{std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4)});
  double prev = INFINITY;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const double h = std::pow(static_cast<double>(n), -0.2);
    double mae = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng = derived_rng(1000 + seed, n);
      const auto s = sample(target, n, rng);
      for (const auto& x : pts) mae += std::fabs(eval_dir(s, h, kVm, x) - mixture_density(target, x)) / (50.0 * 8.0);
    }
    EXPECT_LT(mae, prev) << n;
    prev = mae;
  }
}

TEST(EvalDirLin, SinglePointIsProduct) {
  const DirLinSample s{{UnitVector{0.0, 1.0}}, {0.5}};
  const Bandwidths bw{0.3, 0.4};
  const UnitVector x{0.6, 0.8};
  EXPECT_NEAR(eval_dirlin(s, bw, kVm, kGauss, x, 1.2),
              vmf_density(VmfComponent{s.points[0], 1.0 / 0.09}, x) * normal_pdf(1.2, 0.5, 0.4), 1e-13);
  EXPECT_THROW(eval_dirlin(s, Bandwidths{0.3, 0.0}, kVm, kGauss, x, 0.0), DomainError);
}

TEST(EvalDirLin, NormalizedAndMarginalizes) {
  const auto s = sample(mixtdirlin(1), 80, 21);
  const Bandwidths bw{0.3, 0.4};
  const auto sg = build_sphere_grid(1, 256);
  double zmin = *std::min_element(s.z.begin(), s.z.end()), zmax = *std::max_element(s.z.begin(), s.z.end());
  const auto lg = build_line_grid(0.5 * (zmin + zmax), 0.5 * (zmax - zmin) + 10 * bw.g, 256);
  const auto v = eval_grid(s, bw, kVm, kGauss, sg, lg);
  double total = 0.0;
  for (std::size_t k = 0; k < sg.size(); ++k) {
    double marginal = 0.0;
    for (std::size_t l = 0; l < lg.size(); ++l) marginal += lg.weights[l] * v[k * lg.size() + l];
    if (k % 37 == 0) {
      EXPECT_NEAR(marginal, eval_dir(s.directional_part(), bw.h, kVm, sg.node(k)), 1e-6);
    }
    total += sg.weights[k] * marginal;
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(EvalGrid, IdenticalToPointwise) {
  std::mt19937_64 pick(3);
  const auto s = sample(mixtdir(2), 40, 1);
  const auto grid = build_sphere_grid(2, 32);
  const auto v = eval_grid(s, 0.4, kVm, grid);
  std::uniform_int_distribution<std::size_t> idx(0, grid.size() - 1);
  for (int k = 0; k < 100; ++k) {
    const std::size_t i = idx(pick);
    EXPECT_EQ(v[i], eval_dir(s, 0.4, kVm, grid.node(i)));
  }
  for (double x : v) EXPECT_GE(x, 0.0);

  const auto sl = sample(mixtdirlin(1), 40, 2);
  const Bandwidths bw{0.4, 0.5};
  const auto sg = build_sphere_grid(1, 64);
  const auto lg = build_line_grid(1.0, 6.0, 32);
  const auto w = eval_grid(sl, bw, kVm, kGauss, sg, lg);
  std::uniform_int_distribution<std::size_t> idx2(0, w.size() - 1);
  for (int k = 0; k < 100; ++k) {
    const std::size_t i = idx2(pick);
    const std::size_t node = i / lg.size(), l = i % lg.size();
    EXPECT_EQ(w[i], eval_dirlin(sl, bw, kVm, kGauss, sg.node(node), lg.nodes[l]));
  }
  for (double x : w) EXPECT_GE(x, 0.0);

  const auto z = sample(testing_support::linear_mixture(), 40, 3);
  const auto u = eval_grid(z, 0.3, kGauss, lg);
  for (std::size_t l = 0; l < lg.size(); ++l) EXPECT_EQ(u[l], eval_linear(z, 0.3, kGauss, lg.nodes[l]));
}

TEST(EvalGrid, LinearCost) {
  // time per kernel evaluation stays within a factor 2 across n = 1e2, 1e3, 1e4
  const auto grid = build_sphere_grid(1, 2048);
  std::vector<double> per_unit;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const auto s = sample(mixtdir(1), n, 5);
    const int reps = static_cast<int>(10000 / n);
    double best = INFINITY;
    for (int trial = 0; trial < 3; ++trial) {
      const auto t0 = std::chrono::steady_clock::now();
      double sink = 0.0;
      for (int r = 0; r < reps; ++r) sink += eval_grid(s, 0.3, kVm, grid)[0];
      const auto t1 = std::chrono::steady_clock::now();
      EXPECT_GT(sink, 0.0);
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    per_unit.push_back(best / (reps * static_cast<double>(n) * grid.size()));
  }
  const auto [lo, hi] = std::minmax_element(per_unit.begin(), per_unit.end());
  EXPECT_LT(*hi / *lo, 2.0);
}

TEST(EvalLinear, Basics) {
  const std::vector<double> z{0.0};
  EXPECT_NEAR(eval_linear(z, 0.5, kGauss, 0.3), normal_pdf(0.3, 0.0, 0.5), 1e-15);
  EXPECT_THROW(eval_linear(std::vector<double>{}, 0.5, kGauss, 0.0), DomainError);
  EXPECT_THROW(eval_linear(z, -1.0, kGauss, 0.0), DomainError);
}
