#include "btl/likelihood.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "test_support.hpp"

namespace btl {
namespace {

using testing::make_dataset;

ComparisonDataset random_dataset(int n, double p, int L, std::uint64_t seed) {
  const auto prof = design_two_piece(1.0, n, std::max(1, n / 4));
  for (std::uint64_t s = seed;; s += 1000) {
    const auto g = sample_graph(n, p, {s, 1});
    if (g.connected()) return sample_comparisons(g, prof, random_ranking(n, {s, 4}), L, {s, 2});
  }
}

Vector<double> random_theta(int n, double scale, CounterRng& gen) {
  Vector<double> t(n);
  for (auto& x : t) x = scale * (2.0 * gen.uniform() - 1.0);
  return t;
}

TEST(NegLogLikelihood, ZeroThetaGivesLogTwoPerEdge) {
  const auto data = random_dataset(15, 0.4, 5, 3);
  const double expected = static_cast<double>(data.graph().num_edges()) * std::log(2.0);
  EXPECT_NEAR(neg_log_likelihood(data, Vector<double>::Zero(15)), expected, 1e-12);
}

TEST(NegLogLikelihood, SingleEdgeByHand) {
  // ybar = 3/4, theta_1 - theta_2 = log 3: psi = 3/4 so
  // l = 0.75 log(4/3) + 0.25 log 4
  const auto data = make_dataset(2, {{0, 1, 3}}, 4);
  Vector<double> t(2);
  t << std::log(3.0), 0.0;
  EXPECT_NEAR(neg_log_likelihood(data, t), 0.75 * std::log(4.0 / 3.0) + 0.25 * std::log(4.0), 1e-15);
}

TEST(NegLogLikelihood, MatchesNaiveFormula) {
  CounterRng gen({1, 1});
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = random_dataset(12, 0.5, 6, 100 + rep);
    const auto t = random_theta(12, 5.0, gen);
    EXPECT_NEAR(neg_log_likelihood(data, t), testing::naive_nll(data, t), 1e-10);
  }
}

TEST(NegLogLikelihood, FiniteForHugeArguments) {
  const auto data = make_dataset(2, {{0, 1, 0}}, 3);
  Vector<double> t(2);
  t << 800.0, -800.0;
  EXPECT_NEAR(neg_log_likelihood(data, t), 1600.0, 1e-9);
}

TEST(NegLogLikelihood, ShiftInvariant) {
  CounterRng gen({2, 2});
  const auto data = random_dataset(20, 0.3, 10, 7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = random_theta(20, 3.0, gen);
    const double c = 10.0 * (gen.uniform() - 0.5);
    const Vector<double> s = t.array() + c;
    EXPECT_NEAR(neg_log_likelihood(data, t), neg_log_likelihood(data, s), 1e-10);
    EXPECT_LE((gradient(data, t) - gradient(data, s)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((hessian(data, t) - hessian(data, s)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  CounterRng gen({3, 3});
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = random_dataset(10, 0.5, 4, 200 + rep);
    const auto t = random_theta(10, 2.0, gen);
    // long double objective so the differences are not swamped by rounding
    const auto f = [&](const Vector<double>& x) {
      return static_cast<double>(neg_log_likelihood(data, x.cast<long double>().eval()));
    };
    const auto fd = testing::finite_difference_gradient(f, t);
    const auto g = gradient(data, t);
    EXPECT_LE((g - fd).norm() / std::max(1e-3, g.norm()), 1e-6);
    EXPECT_NEAR(g.sum(), 0.0, 1e-12);
  }
}

TEST(Hessian, MatchesDifferencedGradient) {
  CounterRng gen({4, 4});
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = random_dataset(10, 0.5, 4, 300 + rep);
    const auto t = random_theta(10, 2.0, gen);
    const auto h = hessian(data, t);
    const auto fd = testing::finite_difference_hessian(data, t);
    EXPECT_LE((h - fd).norm() / h.norm(), 1e-5);
    EXPECT_LE((h - h.transpose()).norm(), 0.0);
  }
}

TEST(Hessian, CompleteGraphAtZero) {
  const int n = 9;
  const auto data = testing::complete_dataset(Vector<double>::Zero(n), 3, {5, 0});
  const auto h = hessian(data, Vector<double>::Zero(n));
  const Matrix<double> expected =
      0.25 * (n * Matrix<double>::Identity(n, n) - Matrix<double>::Ones(n, n));
  EXPECT_LE((h - expected).lpNorm<Eigen::Infinity>(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Matrix<double>> es(h);
  EXPECT_NEAR(es.eigenvalues()[0], 0.0, 1e-12);
  for (int i = 1; i < n; ++i) EXPECT_NEAR(es.eigenvalues()[i], n / 4.0, 1e-12);
}

TEST(Hessian, PositiveSemidefiniteOnCenteredSubspace) {
  CounterRng gen({6, 6});
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 25;
    const auto data = random_dataset(n, 0.4, 5, 400 + rep);
    const auto t = random_theta(n, 10.0, gen);
    const auto h = hessian(data, t);
    // orthonormal basis of 1-perp: complete the all-ones vector via QR
    Matrix<double> basis = Matrix<double>::Identity(n, n);
    basis.col(0).setOnes();
    Eigen::HouseholderQR<Matrix<double>> qr(basis);
    const Matrix<double> Q = qr.householderQ();
    const Matrix<double> U = Q.rightCols(n - 1);
    Eigen::SelfAdjointEigenSolver<Matrix<double>> es(U.transpose() * h * U);
    EXPECT_GT(es.eigenvalues()[0], 0.0);  // connected graph: strictly positive
  }
}

TEST(NegLogLikelihood, ConvexAlongRandomDirections) {
  CounterRng gen({7, 7});
  const auto data = random_dataset(30, 0.3, 8, 9);
  const auto t = random_theta(30, 3.0, gen);
  for (int rep = 0; rep < 100; ++rep) {
    Vector<double> u = random_theta(30, 1.0, gen);
    u = (u.array() - u.mean()).matrix().normalized();
    const auto at = [&](double s) {
      const Vector<long double> x = (t + s * u).cast<long double>();
      return neg_log_likelihood(data, x);
    };
    for (double s : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
      const double h = 1e-3;
      EXPECT_GE(at(s + h) - 2 * at(s) + at(s - h), -1e-12L);
    }
  }
}

TEST(Likelihood, RejectsWrongLength) {
  const auto data = make_dataset(3, {{0, 1, 1}}, 2);
  EXPECT_THROW(neg_log_likelihood(data, Vector<double>::Zero(2)), Error);
  EXPECT_THROW(gradient(data, Vector<double>::Zero(4)), Error);
}

}  // namespace
}  // namespace btl
