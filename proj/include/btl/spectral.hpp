#pragma once

#include "btl/mle.hpp"

namespace btl {

/// Rank Centrality chain: P_ij = A_ij ybar_ji / d off the diagonal, so the
/// walk moves from i toward the players that beat i; the diagonal completes
/// each row to one.
struct TransitionMatrix {
  Matrix<double> P;
  double d = 1.0;
  /// Underlying comparison graph (needed for the irreducibility check).
  ComparisonGraph graph;

  int n() const { return static_cast<int>(P.rows()); }
};

struct StationaryDistribution {
  Vector<double> pi;
  double residual = 0.0;  // ||pi^T P - pi^T||_1
  int iterations = 0;
};

enum class StationaryMethod {
  Auto,            // dense solve for n <= 64, power iteration above
  PowerIteration,  // from the uniform vector
  DenseSolve,
};

inline constexpr double kStationaryTol = 1e-12;
inline constexpr int kStationaryMaxIters = 1'000'000;
inline constexpr int kDenseSolveMaxN = 64;

/// d = 2 n p with the recorded generation p; if the dataset carries no p,
/// d = 2 * max degree. Throws DegreeOverflow when a degree exceeds d or a
/// row would get a nonpositive diagonal.
TransitionMatrix build_transition(const ComparisonDataset& data);
/// Same chain with an explicit normalizer d (any d >= max degree keeps the
/// stationary distribution unchanged).
TransitionMatrix build_transition(const ComparisonDataset& data, double d);

/// Exact-probability chain P*: ybar_ji replaced by psi(theta_j - theta_i)
/// for the given per-player skills.
TransitionMatrix build_expected_transition(const ComparisonGraph& graph,
                                           const Vector<double>& skills, double d);

/// Throws ReducibleChain for a disconnected comparison graph and NotConverged
/// when power iteration exhausts max_iters.
StationaryDistribution stationary_distribution(const TransitionMatrix& chain,
                                               double tol = kStationaryTol,
                                               int max_iters = kStationaryMaxIters,
                                               StationaryMethod method = StationaryMethod::Auto);

/// Scores are the stationary probabilities pi-hat; ranking orders by pi-hat.
FitResult fit_spectral(const ComparisonDataset& data,
                       StationaryMethod method = StationaryMethod::Auto);

}  // namespace btl
