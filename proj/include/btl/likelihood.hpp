#pragma once

// Negative log-likelihood of the BTL model and its derivatives, written as
// free functions over any Eigen-compatible scalar (double for the solvers,
// long double for high-precision reference checks).

#include "btl/model.hpp"
#include "btl/simulate.hpp"

namespace btl {

namespace detail {
template <typename Derived>
void check_length(const ComparisonDataset& data, const Eigen::MatrixBase<Derived>& theta) {
  if (theta.size() != data.n()) {
    throw Error(ErrorCode::DimensionMismatch, "theta length differs from number of players");
  }
}
}  // namespace detail

/// l_n(theta) = sum over edges of ybar log(1/psi(d)) + (1 - ybar) log(1/(1 - psi(d))),
/// d = theta_i - theta_j. Invariant under a common shift of theta.
template <typename Derived>
typename Derived::Scalar neg_log_likelihood(const ComparisonDataset& data,
                                            const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  detail::check_length(data, theta);
  Scalar total(0);
  const auto& edges = data.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Scalar d = theta[edges[e].i] - theta[edges[e].j];
    const Scalar y = Scalar(data.wins()[e]) / Scalar(data.games_per_edge());
    // log(1/psi(d)) = log(1+e^{-d}); log(1/(1-psi(d))) = log(1+e^{d})
    total += y * log1p_exp_neg(d) + (Scalar(1) - y) * log1p_exp_neg(-d);
  }
  return total;
}

/// grad_m = -sum_{j ~ m} (ybar_mj - psi(theta_m - theta_j)); entries sum to zero.
template <typename Derived>
Vector<typename Derived::Scalar> gradient(const ComparisonDataset& data,
                                          const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  detail::check_length(data, theta);
  Vector<Scalar> g = Vector<Scalar>::Zero(theta.size());
  const auto& edges = data.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    const Scalar y = Scalar(data.wins()[e]) / Scalar(data.games_per_edge());
    const Scalar r = sigmoid<Scalar>(theta[i] - theta[j]) - y;
    g[i] += r;
    g[j] -= r;
  }
  return g;
}

/// Weighted graph Laplacian with edge weights psi'(theta_i - theta_j).
template <typename Derived>
Matrix<typename Derived::Scalar> hessian(const ComparisonDataset& data,
                                         const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  detail::check_length(data, theta);
  Matrix<Scalar> h = Matrix<Scalar>::Zero(theta.size(), theta.size());
  for (const auto& [i, j] : data.graph().edges()) {
    const Scalar w = sigmoid_prime<Scalar>(theta[i] - theta[j]);
    h(i, j) -= w;
    h(j, i) -= w;
    h(i, i) += w;
    h(j, j) += w;
  }
  return h;
}

}  // namespace btl
