#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tcmap/rng.hpp"
#include "tcmap/thermal.hpp"

using namespace tcmap;

TEST(ThermalParams, DefaultsAreStable) {
  ThermalParams p;
  EXPECT_NO_THROW(validate(p));
  EXPECT_LE(p.dt_s, p.max_stable_dt());
  p.dt_s = 0.02;
  EXPECT_THROW(validate(p), InputError);
  p = ThermalParams{};
  p.g_amb = 0;
  EXPECT_THROW(validate(p), InputError);
}

TEST(ThermalStep, EquilibriumIsFixedPoint) {
  const ThermalModel model({4, 4}, {});
  ThermalState s = ambient_state(16, model.params());
  const std::vector<double> zero(16, 0.0);
  for (int i = 0; i < 100; ++i) s = model.step(s, zero);
  for (double t : s.temps_c) EXPECT_EQ(t, 45.0);
  EXPECT_NEAR(s.time_s, 1.0, 1e-12);
}

TEST(ThermalStep, MirrorSymmetryIsPreserved) {
  const GridDims dims{4, 4};
  const ThermalModel model(dims, {});
  std::vector<double> p(16, 0.0);
  p[core_at({1, 0}, dims)] = 4.0;
  p[core_at({1, 3}, dims)] = 4.0;
  p[core_at({2, 1}, dims)] = 1.5;
  p[core_at({2, 2}, dims)] = 1.5;
  ThermalState s = ambient_state(16, model.params());
  for (int k = 0; k < 500; ++k) {
    s = model.step(s, p);
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 2; ++y)
        ASSERT_NEAR(s.temps_c[core_at({x, y}, dims)], s.temps_c[core_at({x, 3 - y}, dims)], 1e-12);
  }
}

TEST(ThermalStep, DimensionMismatchAndNegativePower) {
  const ThermalModel model({2, 2}, {});
  const ThermalState s = ambient_state(4, model.params());
  EXPECT_THROW(model.step(s, std::vector<double>(3, 0.0)), DimensionMismatch);
  EXPECT_THROW(model.step(s, std::vector<double>{0, -1, 0, 0}), InputError);
}

TEST(ThermalStep, ConvergesToSteadyState) {
  const GridDims dims{8, 8};
  const ThermalParams params;
  const ThermalModel model(dims, params);
  std::vector<double> p(64, 0.0);
  p[core_at({3, 4}, dims)] = 5.0;
  const auto ss = model.steady_state(p);
  ThermalState s = ambient_state(64, params);
  const int steps = static_cast<int>(std::ceil(20.0 * params.c_tile / params.g_amb / params.dt_s));
  for (int k = 0; k < steps; ++k) s = model.step(s, p);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(s.temps_c[i], ss[i], 0.1);
}

TEST(ThermalStep, ZeroPowerDecayIsMonotoneInMaxNorm) {
  const ThermalParams params;
  const ThermalModel model({4, 4}, params);
  Rng rng(4);
  ThermalState s{std::vector<double>(16), 0.0};
  for (double& t : s.temps_c) t = rng.uniform(45.0, 90.0);
  const std::vector<double> zero(16, 0.0);
  auto excess = [&](const ThermalState& st) {
    double m = 0;
    for (double t : st.temps_c) m = std::max(m, std::fabs(t - params.t_ambient_c));
    return m;
  };
  double prev = excess(s);
  for (int k = 0; k < 300; ++k) {
    s = model.step(s, zero);
    const double now = excess(s);
    ASSERT_LE(now, prev + 1e-12);
    prev = now;
  }
}

TEST(SteadyState, ZeroPowerIsAmbient) {
  const ThermalModel model({4, 4}, {});
  for (double t : model.steady_state(std::vector<double>(16, 0.0))) EXPECT_DOUBLE_EQ(t, 45.0);
}

TEST(SteadyState, DecoupledTilesFollowOhmsLaw) {
  ThermalParams params;
  params.g_adj = 0.0;
  const ThermalModel model({3, 3}, params);
  std::vector<double> p(9, 0.0);
  p[2] = 5.0;
  const auto t = model.steady_state(p);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(t[i], i == 2 ? 55.0 : 45.0, 1e-12);
}

TEST(SteadyState, RiseFallsAwayFromSource) {
  const GridDims dims{8, 8};
  const ThermalModel model(dims, {});
  for (CoreId src : {CoreId{0}, core_at({3, 3}, dims), core_at({2, 6}, dims)}) {
    std::vector<double> p(64, 0.0);
    p[src] = 5.0;
    const auto t = model.steady_state(p);
    // every step away from the source lowers the temperature
    const auto nbrs = mesh_neighbors(dims);
    for (CoreId c = 0; c < 64; ++c)
      for (CoreId n : nbrs[c]) {
        const GridPos s = position_of(src, dims);
        if (manhattan_distance(position_of(n, dims), s) > manhattan_distance(position_of(c, dims), s))
          EXPECT_GT(t[c] - 45.0, t[n] - 45.0) << "src " << src << " from " << c << " to " << n;
      }
  }
}

TEST(SteadyState, MatchesIndependentGaussianElimination) {
  const GridDims dims{6, 5};
  ThermalParams params;
  params.g_adj = 0.2;
  params.g_amb = 0.4;
  params.dt_s = 0.005;
  const ThermalModel model(dims, params);
  Rng rng(12);
  std::vector<double> p(30);
  for (double& v : p) v = rng.uniform(0.0, 8.0);
  const auto expected = oracle::steady_state(dims, params, p);
  const auto got = model.steady_state(p);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-9);
}

TEST(SteadyState, EnergyBalanceAndMaximumPrinciple) {
  const ThermalParams params;
  const ThermalModel model({8, 8}, params);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(64);
    for (double& v : p) v = rng.uniform() < 0.3 ? rng.uniform(0.0, 10.0) : 0.0;
    const auto t = model.steady_state(p);
    double total_p = std::accumulate(p.begin(), p.end(), 0.0);
    double total_rise = 0;
    for (double v : t) {
      EXPECT_GE(v, params.t_ambient_c - 1e-12);
      total_rise += v - params.t_ambient_c;
    }
    if (total_p > 0) EXPECT_NEAR(params.g_amb * total_rise / total_p, 1.0, 1e-9);
  }
}

TEST(Laplacian, SymmetricWithZeroRowSums) {
  const auto lap = laplacian({5, 7}, 0.125);
  EXPECT_TRUE(lap.isApprox(lap.transpose()));
  for (Eigen::Index r = 0; r < lap.rows(); ++r) EXPECT_NEAR(lap.row(r).sum(), 0.0, 1e-15);
  // interior degree 4, corner degree 2
  EXPECT_DOUBLE_EQ(lap(core_at({2, 3}, {5, 7}), core_at({2, 3}, {5, 7})), 0.5);
  EXPECT_DOUBLE_EQ(lap(0, 0), 0.25);
}
