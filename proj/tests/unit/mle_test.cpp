#include "btl/mle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "btl/likelihood.hpp"
#include "btl/metrics.hpp"
#include "test_support.hpp"

namespace btl {
namespace {

using testing::make_dataset;

// Root of d/dx [ y log(1+e^-x) + (1-y) log(1+e^x) ] = psi(x) - y by bisection.
double bisect_logit(double y) {
  double lo = -50, hi = 50;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 / (1.0 + std::exp(-mid)) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(FitMle, TwoPlayersOneEdge) {
  const auto data = make_dataset(2, {{0, 1, 3}}, 4);
  const auto fit = fit_mle(data);
  ASSERT_TRUE(fit.converged);
  const double gap = bisect_logit(0.75);
  EXPECT_NEAR(gap, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.scores[0], gap / 2, 1e-10);
  EXPECT_NEAR(fit.scores[1], -gap / 2, 1e-10);
  EXPECT_EQ(fit.ranking, Ranking::identity(2));
}

TEST(FitMle, MatchesGridSearchOnThreePlayers) {
  int checked = 0;
  for (std::uint64_t s = 0; checked < 10; ++s) {
    Vector<double> skills(3);
    CounterRng gen({s, 77});
    for (auto& x : skills) x = 2.0 * gen.uniform() - 1.0;
    const auto data = testing::complete_dataset(skills, 8, {s, 0});
    // skip samples where a player wins or loses everything: no finite MLE
    bool separated = false;
    for (int m = 0; m < 3; ++m) {
      int w = 0;
      for (int o = 0; o < 3; ++o) if (o != m) w += static_cast<int>(std::lround(8 * data.ybar(m, o)));
      separated |= w == 0 || w == 16;
    }
    if (separated) continue;
    const auto fit = fit_mle(data);
    ASSERT_TRUE(fit.converged);
    const auto oracle = testing::grid_search_mle3(data);
    EXPECT_LE((fit.scores - oracle).lpNorm<Eigen::Infinity>(), 1e-3) << "seed " << s;
    ++checked;
  }
}

TEST(FitMle, ConsistentAtLargeL) {
  const auto data = testing::complete_dataset(Vector<double>::Zero(10), 10000, {3, 3});
  const auto fit = fit_mle(data);
  ASSERT_TRUE(fit.converged);
  EXPECT_LE(fit.scores.lpNorm<Eigen::Infinity>(), 0.1);
}

ComparisonDataset moderate_instance(std::uint64_t seed, int n = 60) {
  const auto prof = design_two_piece(1.0, n, n / 4);
  for (std::uint64_t s = seed;; s += 1000) {
    const auto g = sample_graph(n, 0.3, {s, 1});
    if (g.connected()) return sample_comparisons(g, prof, Ranking::identity(n), 10, {s, 2});
  }
}

TEST(FitMle, FirstOrderConditionAndCentering) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto data = moderate_instance(s);
    const auto fit = fit_mle(data);
    ASSERT_TRUE(fit.converged);
    EXPECT_LE(gradient(data, fit.scores).lpNorm<Eigen::Infinity>(), 1e-10);
    EXPECT_NEAR(fit.scores.sum(), 0.0, 1e-11);
    EXPECT_LE(fit.iterations, 30);
  }
}

TEST(FitMle, RefitFromOptimumIsImmediate) {
  for (std::uint64_t s = 10; s < 15; ++s) {
    const auto data = moderate_instance(s);
    const auto first = fit_mle(data);
    MleOptions warm;
    warm.initial = first.scores;
    const auto again = fit_mle(data, warm);
    EXPECT_TRUE(again.converged);
    EXPECT_LE(again.iterations, 2);
    EXPECT_LE((again.scores - first.scores).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(FitMle, RegularizedCloseToVanilla) {
  for (std::uint64_t s = 20; s < 25; ++s) {
    const auto data = moderate_instance(s);
    MleOptions reg;
    reg.mode = Regularized{1.0 / data.n()};
    const auto a = fit_mle(data);
    const auto b = fit_mle(data, reg);
    ASSERT_TRUE(b.converged);
    EXPECT_LE((a.scores - b.scores).lpNorm<Eigen::Infinity>(), 0.05);
    // ridge stationarity: grad + lambda theta = 0
    EXPECT_LE((gradient(data, b.scores) + b.scores / data.n()).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(FitMle, GradientDescentAgreesWithNewton) {
  const auto data = moderate_instance(31, 30);
  MleOptions gd;
  gd.solver = Solver::GradientDescent;
  gd.grad_tol = 1e-8;
  const auto a = fit_mle(data);
  const auto b = fit_mle(data, gd);
  ASSERT_TRUE(b.converged);
  EXPECT_LE((a.scores - b.scores).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(FitMle, DisconnectedGraphRejected) {
  const auto data = make_dataset(4, {{0, 1, 2}, {2, 3, 1}}, 4);
  try {
    fit_mle(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DisconnectedGraph);
  }
}

TEST(FitMle, SeparatedPlayerDivergesOrHitsBox) {
  // player 0 wins every game: no finite maximizer
  const auto data = make_dataset(3, {{0, 1, 5}, {0, 2, 5}, {1, 2, 3}}, 5);
  try {
    fit_mle(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Diverged);
  }
  MleOptions box;
  box.mode = BoxConstrained{6.0};
  const auto fit = fit_mle(data, box);
  EXPECT_TRUE(fit.converged);
  EXPECT_TRUE(fit.boundary_hit);
  EXPECT_LE(fit.scores.lpNorm<Eigen::Infinity>(), 6.0 + 1e-12);
  EXPECT_EQ(fit.ranking[0], 1);
}

TEST(FitMle, BoxInactiveMatchesVanilla) {
  const auto data = moderate_instance(41);
  MleOptions box;
  box.mode = BoxConstrained{};
  const auto a = fit_mle(data);
  const auto b = fit_mle(data, box);
  EXPECT_FALSE(b.boundary_hit);
  EXPECT_LE((a.scores - b.scores).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(FitMle, MaxItersReportedNotThrown) {
  const auto data = moderate_instance(51, 30);
  MleOptions o;
  o.max_iters = 1;
  const auto fit = fit_mle(data, o);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 1);
}

TEST(ThresholdError, Examples) {
  Vector<double> s(4);
  s << 4, 3, 2, 1;
  EXPECT_EQ(topk_threshold_error(s, Ranking::identity(4), 2), 0.0);
  const Vector<double> flat = Vector<double>::Constant(6, 1.0);
  const auto id = Ranking::identity(6);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(topk_threshold_error(flat, id, k), testing::brute_threshold_error(flat, id.ranks(), k));
    EXPECT_EQ(topk_threshold_error(flat, id, k), std::min(1.0, (6.0 - k) / k));
  }
}

TEST(ThresholdError, MatchesEnumeration) {
  CounterRng gen({8, 8});
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + static_cast<int>(gen.below(30));
    const int k = 1 + static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
    Vector<double> s(n);
    for (auto& x : s) x = std::floor(6 * gen.uniform());  // lots of ties
    const Ranking truth(testing::random_ranks(n, gen));
    EXPECT_EQ(topk_threshold_error(s, truth, k), testing::brute_threshold_error(s, truth.ranks(), k));
  }
}

TEST(ThresholdError, BoundsInducedHamming) {
  for (std::uint64_t s = 60; s < 70; ++s) {
    const auto data = moderate_instance(s);
    const auto fit = fit_mle(data);
    const int k = 15;
    EXPECT_LE(hamming_topk(fit.ranking, Ranking::identity(data.n()), k),
              topk_threshold_error(fit.scores, Ranking::identity(data.n()), k) + 1e-15);
  }
}

}  // namespace
}  // namespace btl
