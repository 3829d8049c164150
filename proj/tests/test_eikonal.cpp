#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "se2fm/eikonal.hpp"
#include "se2fm/error.hpp"

using namespace se2fm;

namespace {

constexpr double kPi = std::numbers::pi;

// Bisection on the monotone function sum w max(0, u - a)^2 - 1.
double bisect_update(const std::vector<double>& w, const std::vector<double>& a) {
  double lo = kInf;
  for (std::size_t t = 0; t < w.size(); ++t)
    if (w[t] > 0 && std::isfinite(a[t])) lo = std::min(lo, a[t]);
  if (!std::isfinite(lo)) return kInf;
  auto f = [&](double u) {
    double s = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
      if (w[t] == 0 || !std::isfinite(a[t])) continue;
      const double d = std::max(0.0, u - a[t]);
      s += w[t] * d * d;
    }
    return s - 1.0;
  };
  double hi = lo + 1.0;
  while (f(hi) < 0) hi = lo + 2 * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Residual at one node evaluated directly from the stencil definition.
double brute_residual_at(const DistanceField& f, const CostVolume& cost,
                         const StencilCache& cache, int i, int j, int k) {
  const GridSpec& g = f.grid;
  const double u = f.at(i, j, k);
  if (!std::isfinite(u) || u == 0.0) return 0.0;
  auto value = [&](int a, int b, int c) {
    if (!g.in_plane(a, b)) return kInf;
    return f.at(a, b, g.wrap_k(c));
  };
  double s = 0.0;
  const double c = cost.at(i, j, k);
  for (const auto& t : cache.slice(k).terms) {
    const auto& e = t.offset;
    const double a = std::min(value(i - e[0], j - e[1], k - e[2]),
                              value(i + e[0], j + e[1], k + e[2]));
    const double d = std::max(0.0, u - a);
    s += t.weight / (c * c) * d * d;
  }
  return std::abs(s - 1.0);
}

double brute_residual(const DistanceField& f, const CostVolume& cost, const StencilCache& cache) {
  double best = 0.0;
  const GridSpec& g = f.grid;
  for (int k = 0; k < g.ntheta; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        best = std::max(best, brute_residual_at(f, cost, cache, i, j, k));
  return best;
}

GridSpec box(int nx, int ny, int nt) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.ntheta = nt;
  g.hx = g.hy = 2 * kPi / nt;
  g.origin_x = -(nx / 2) * g.hx;
  g.origin_y = -(ny / 2) * g.hy;
  return g;
}

CostVolume random_cost(const GridSpec& g, std::mt19937& rng, double lo = 0.1) {
  std::uniform_real_distribution<double> c(lo, 1.0);
  CostVolume cost = CostVolume::uniform(g);
  for (auto& v : cost.values) v = c(rng);
  return cost;
}

SolveConfig centered(const GridSpec& g, SolveMode mode = SolveMode::kFastMarching) {
  SolveConfig cfg;
  cfg.params = {0.1, 1.0};
  cfg.seeds = {g.center_index()};
  cfg.mode = mode;
  return cfg;
}

double max_diff(const DistanceField& a, const DistanceField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    if (std::isinf(a.values[n]) || std::isinf(b.values[n])) {
      if (a.values[n] != b.values[n]) return kInf;
      continue;
    }
    m = std::max(m, std::abs(a.values[n] - b.values[n]));
  }
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(LocalUpdate, Examples) {
  const double w1[] = {1.0}, a1[] = {0.0};
  EXPECT_DOUBLE_EQ(local_update(w1, a1), 1.0);
  const double w2[] = {1.0, 1.0}, a2[] = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(local_update(w2, a2), 1.0 / std::sqrt(2.0));
  const double a3[] = {0.0, 10.0};
  EXPECT_DOUBLE_EQ(local_update(w2, a3), 1.0);
}

TEST(LocalUpdate, UnreachableAndInvalid) {
  const double w[] = {1.0, 2.0}, a[] = {kInf, kInf};
  EXPECT_TRUE(std::isinf(local_update(w, a)));
  const double w0[] = {0.0, 0.0}, a0[] = {1.0, 2.0};
  EXPECT_TRUE(std::isinf(local_update(w0, a0)));
  const double wn[] = {-1.0}, an[] = {0.0};
  EXPECT_THROW(local_update(wn, an), Error);
  const double wl[] = {1.0, 1.0}, al[] = {0.0};
  EXPECT_THROW(local_update(std::span<const double>(wl, 2), std::span<const double>(al, 1)),
               Error);
}

TEST(LocalUpdate, MatchesBisectionAndIsCausal) {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> w(0.0, 50.0), a(0.0, 3.0), p(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> ws(n), as(n);
    for (int t = 0; t < n; ++t) {
      ws[t] = p(rng) < 0.1 ? 0.0 : w(rng);
      as[t] = p(rng) < 0.1 ? kInf : a(rng);
    }
    const double u = local_update(ws, as);
    const double ref = bisect_update(ws, as);
    if (std::isinf(ref)) {
      EXPECT_TRUE(std::isinf(u));
      continue;
    }
    EXPECT_NEAR(u, ref, 1e-12 * std::max(1.0, ref));
    double s = 0.0;
    for (int t = 0; t < n; ++t) {
      if (ws[t] == 0 || std::isinf(as[t])) continue;
      if (as[t] < u) s += ws[t] * (u - as[t]) * (u - as[t]);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Solve, ConfigErrors) {
  const GridSpec g = box(9, 9, 8);
  const CostVolume cost = CostVolume::uniform(g);
  SolveConfig cfg = centered(g);
  cfg.seeds.clear();
  EXPECT_EQ(code_of([&] { solve(cost, cfg); }), ErrorCode::kInvalidArgument);
  cfg.seeds = {{9, 0, 0}};
  EXPECT_EQ(code_of([&] { solve(cost, cfg); }), ErrorCode::kOutOfDomain);
  cfg = centered(g);
  cfg.params.epsilon = 0.0;
  EXPECT_EQ(code_of([&] { solve(cost, cfg); }), ErrorCode::kInvalidArgument);
  cfg = centered(g);
  CostVolume bad = cost;
  bad.values[3] = 0.0;
  EXPECT_EQ(code_of([&] { solve(bad, cfg); }), ErrorCode::kNonPositiveCost);
  cfg = centered(g, SolveMode::kFixedPoint);
  cfg.max_sweeps = 1;
  EXPECT_EQ(code_of([&] { solve(cost, cfg); }), ErrorCode::kIterationCap);
}

TEST(Solve, SeedsZeroOthersPositive) {
  const GridSpec g = box(11, 9, 12);
  std::mt19937 rng(20);
  const CostVolume cost = random_cost(g, rng);
  SolveConfig cfg = centered(g);
  cfg.seeds.push_back({1, 2, 3});
  SolveStats st;
  const DistanceField f = solve(cost, cfg, &st);
  EXPECT_EQ(f.at(g.center_index().i, g.center_index().j, g.center_index().k), 0.0);
  EXPECT_EQ(f.at(1, 2, 3), 0.0);
  EXPECT_EQ(f.zero_nodes().size(), 2u);
  for (double v : f.values) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
  EXPECT_TRUE(st.monotone_acceptance);
  EXPECT_EQ(st.accepted, g.size());
}

TEST(Solve, AxisDistances) {
  const int n = 25;
  const GridSpec g = GridSpec::validation(n);
  const double s = kPi / n;
  const DistanceField f = solve(CostVolume::uniform(g), centered(g));
  const GridIndex c = g.center_index();
  for (int k = 0; k < g.ntheta; ++k) {
    EXPECT_NEAR(f.at(c.i, c.j, k), std::abs(g.theta_of(k)), 2 * s) << "k " << k;
  }
  for (int i = 0; i < g.nx; ++i) {
    EXPECT_NEAR(f.at(i, c.j, c.k), std::abs(g.x_of(i)), 2 * s) << "i " << i;
  }
}

TEST(Solve, ResidualPostconditionBothModes) {
  const GridSpec g = box(15, 13, 16);
  std::mt19937 rng(21);
  const CostVolume cost = random_cost(g, rng);
  const StencilCache cache(g, {0.1, 1.0});
  for (SolveMode mode : {SolveMode::kFastMarching, SolveMode::kFixedPoint}) {
    const DistanceField f = solve(cost, centered(g, mode), cache);
    EXPECT_LE(residual(f, cost, {0.1, 1.0}), 1e-6);
    EXPECT_LE(brute_residual(f, cost, cache), 1e-6);
  }
}

TEST(Residual, AgreesWithDirectEvaluation) {
  const GridSpec g = box(12, 10, 8);
  std::mt19937 rng(22);
  const CostVolume cost = random_cost(g, rng);
  const StencilCache cache(g, {0.2, 1.3});
  SolveConfig cfg = centered(g);
  cfg.params = {0.2, 1.3};
  DistanceField f = solve(cost, cfg, cache);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  for (auto& v : f.values)
    if (v > 0) v = std::max(1e-3, v + noise(rng));
  EXPECT_NEAR(residual(f, cost, cache), brute_residual(f, cost, cache), 1e-12);
  for (int trial = 0; trial < 50; ++trial) {
    const int i = static_cast<int>(rng() % g.nx), j = static_cast<int>(rng() % g.ny),
              k = static_cast<int>(rng() % g.ntheta);
    EXPECT_NEAR(node_residual(f, cost, cache, {i, j, k}),
                brute_residual_at(f, cost, cache, i, j, k), 1e-12);
  }
}

TEST(Residual, PerturbationIsDetected) {
  const GridSpec g = box(15, 15, 16);
  const CostVolume cost = CostVolume::uniform(g);
  const StencilCache cache(g, {0.1, 1.0});
  DistanceField f = solve(cost, centered(g), cache);
  const GridIndex m{10, 9, 4};
  f.at(m.i, m.j, m.k) += 1.0;
  EXPECT_GE(residual(f, cost, cache), 0.1);
  EXPECT_GE(node_residual(f, cost, cache, m), 0.1);
}

TEST(Residual, AllSeedsIsZero) {
  const GridSpec g = box(5, 5, 4);
  const CostVolume cost = CostVolume::uniform(g);
  DistanceField f = DistanceField::unreached(g);
  for (auto& v : f.values) v = 0.0;
  EXPECT_EQ(residual(f, cost, {0.1, 1.0}), 0.0);
}

TEST(Solve, FastMarchingMatchesFixedPoint) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 4; ++trial) {
    const GridSpec g = box(13, 11, 12);
    const CostVolume cost = random_cost(g, rng);
    const StencilCache cache(g, {0.1, 1.0});
    SolveConfig fm = centered(g);
    fm.seeds.push_back({static_cast<int>(rng() % g.nx), static_cast<int>(rng() % g.ny),
                        static_cast<int>(rng() % g.ntheta)});
    SolveConfig fp = fm;
    fp.mode = SolveMode::kFixedPoint;
    SolveStats st;
    const DistanceField a = solve(cost, fm, cache);
    const DistanceField b = solve(cost, fp, cache, &st);
    EXPECT_LE(max_diff(a, b), 1e-8);
    EXPECT_GT(st.sweeps, 0);
  }
}

TEST(Solve, MonotoneInCost) {
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> bump(1.0, 3.0), p(0.0, 1.0);
  const GridSpec g = box(9, 9, 8);
  const StencilCache cache(g, {0.1, 1.0});
  for (int trial = 0; trial < 20; ++trial) {
    const CostVolume lo = random_cost(g, rng, 0.1);
    CostVolume hi = lo;
    for (auto& v : hi.values)
      if (p(rng) < 0.5) v = std::min(1.0, v * bump(rng));
    SolveConfig cfg = centered(g);
    const DistanceField a = solve(lo, cfg, cache);
    const DistanceField b = solve(hi, cfg, cache);
    for (std::size_t n = 0; n < a.values.size(); ++n) EXPECT_LE(a.values[n], b.values[n]);
  }
}

TEST(Solve, CostHomogeneity) {
  std::mt19937 rng(25);
  const GridSpec g = box(17, 15, 16);
  const CostVolume cost = random_cost(g, rng);
  CostVolume scaled = cost;
  for (auto& v : scaled.values) v *= 0.37;
  const StencilCache cache(g, {0.1, 1.0});
  const DistanceField a = solve(cost, centered(g), cache);
  const DistanceField b = solve(scaled, centered(g), cache);
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    if (a.values[n] == 0.0) {
      EXPECT_EQ(b.values[n], 0.0);
      continue;
    }
    EXPECT_LE(std::abs(b.values[n] - 0.37 * a.values[n]) / (0.37 * a.values[n]), 1e-12);
  }
}

TEST(Solve, DiscreteSymmetries) {
  const GridSpec g = GridSpec::validation(10);
  const DistanceField f = solve(CostVolume::uniform(g), centered(g));
  const GridIndex c = g.center_index();
  for (int k = 0; k < g.ntheta; ++k) {
    const int km = g.wrap_k(2 * c.k - k);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        EXPECT_EQ(f.at(i, j, k), f.at(2 * c.i - i, 2 * c.j - j, k));
        EXPECT_EQ(f.at(i, j, k), f.at(i, 2 * c.j - j, km));
      }
  }
}

TEST(Solve, BetaScalesRotationCost) {
  // With beta the rotation axis is unchanged and forward motion costs beta.
  const GridSpec g = GridSpec::validation(12);
  SolveConfig cfg = centered(g);
  cfg.params = {0.1, 2.0};
  const DistanceField f = solve(CostVolume::uniform(g), cfg);
  const GridIndex c = g.center_index();
  const double s = kPi / 12;
  EXPECT_NEAR(f.at(c.i, c.j, c.k + 6), std::abs(g.theta_of(c.k + 6)), 2 * s);
  EXPECT_NEAR(f.at(c.i + 6, c.j, c.k), 2.0 * std::abs(g.x_of(c.i + 6)), 4 * s);
}
