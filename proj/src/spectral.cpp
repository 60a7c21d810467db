#include "btl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace btl {

namespace {

double stationarity_residual(const Matrix<double>& P, const Vector<double>& pi) {
  return (P.transpose() * pi - pi).lpNorm<1>();
}

void check_diagonal(const Matrix<double>& P) {
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (!(P(i, i) > 0.0)) {
      throw Error(ErrorCode::DegreeOverflow,
                  "row " + std::to_string(i + 1) + " has no holding probability; d is too small");
    }
  }
}

Vector<double> dense_solve(const Matrix<double>& P) {
  const Eigen::Index n = P.rows();
  Matrix<double> a = P.transpose() - Matrix<double>::Identity(n, n);
  a.row(n - 1).setOnes();
  Vector<double> b = Vector<double>::Zero(n);
  b[n - 1] = 1.0;
  Vector<double> pi = a.fullPivLu().solve(b);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

}  // namespace

TransitionMatrix build_transition(const ComparisonDataset& data, double d) {
  const int n = data.n();
  if (data.graph().num_edges() == 0) throw Error(ErrorCode::InvalidArgument, "dataset has no comparisons");
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "normalizer d must be positive");
  const auto deg = data.graph().degrees();
  const int max_deg = *std::max_element(deg.begin(), deg.end());
  if (max_deg > d) {
    throw Error(ErrorCode::DegreeOverflow, "maximum degree " + std::to_string(max_deg) +
                                               " exceeds d = " + std::to_string(d));
  }
  TransitionMatrix out{Matrix<double>::Zero(n, n), d, data.graph()};
  const auto& edges = data.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    const double y_ij = data.ybar(e);
    out.P(i, j) = (1.0 - y_ij) / d;  // ybar_ji
    out.P(j, i) = y_ij / d;
  }
  for (int i = 0; i < n; ++i) out.P(i, i) = 1.0 - (out.P.row(i).sum() - out.P(i, i));
  check_diagonal(out.P);
  return out;
}

TransitionMatrix build_transition(const ComparisonDataset& data) {
  if (const auto p = data.graph().p()) return build_transition(data, 2.0 * data.n() * *p);
  const auto deg = data.graph().degrees();
  const int max_deg = *std::max_element(deg.begin(), deg.end());
  std::cerr << "warning: dataset has no generation p; using d = 2 * max degree = "
            << 2 * max_deg << '\n';
  return build_transition(data, 2.0 * max_deg);
}

TransitionMatrix build_expected_transition(const ComparisonGraph& graph,
                                           const Vector<double>& skills, double d) {
  const int n = graph.n();
  if (skills.size() != n) throw Error(ErrorCode::DimensionMismatch, "skills length differs from graph size");
  TransitionMatrix out{Matrix<double>::Zero(n, n), d, graph};
  for (const auto& [i, j] : graph.edges()) {
    out.P(i, j) = sigmoid(skills[j] - skills[i]) / d;
    out.P(j, i) = sigmoid(skills[i] - skills[j]) / d;
  }
  for (int i = 0; i < n; ++i) out.P(i, i) = 1.0 - (out.P.row(i).sum() - out.P(i, i));
  check_diagonal(out.P);
  return out;
}

StationaryDistribution stationary_distribution(const TransitionMatrix& chain, double tol,
                                               int max_iters, StationaryMethod method) {
  const int n = chain.n();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "empty chain");
  if (!chain.graph.connected()) {
    throw Error(ErrorCode::ReducibleChain, "comparison graph is disconnected; stationary distribution is not unique");
  }
  if (method == StationaryMethod::Auto) {
    method = n <= kDenseSolveMaxN ? StationaryMethod::DenseSolve : StationaryMethod::PowerIteration;
  }

  StationaryDistribution out;
  if (method == StationaryMethod::DenseSolve) {
    out.pi = dense_solve(chain.P);
    out.residual = stationarity_residual(chain.P, out.pi);
    if (out.residual <= tol) return out;
    // Ill-conditioned solve: polish with power iteration from the solution.
  } else {
    out.pi = Vector<double>::Constant(n, 1.0 / n);
  }

  // A small residual alone is not enough on slowly mixing (lazy) chains: the
  // distance to the fixed point is about residual / (1 - rate), with the rate
  // read off successive residuals.
  const Matrix<double> Pt = chain.P.transpose();
  Vector<double> next(n);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    next.noalias() = Pt * out.pi;
    out.residual = (next - out.pi).lpNorm<1>();
    out.iterations = it;
    if (out.residual <= tol) {
      const double rate = out.residual / prev;
      if (out.residual <= 1e-3 * tol || (rate < 1.0 && out.residual / (1.0 - rate) <= tol)) return out;
    }
    prev = out.residual;
    out.pi = next / next.sum();
  }
  out.iterations = max_iters;
  out.residual = stationarity_residual(chain.P, out.pi);
  if (out.residual <= tol) return out;
  throw Error(ErrorCode::NotConverged, "power iteration did not reach the stationarity tolerance");
}

FitResult fit_spectral(const ComparisonDataset& data, StationaryMethod method) {
  const auto chain = build_transition(data);
  const auto stat = stationary_distribution(chain, kStationaryTol, kStationaryMaxIters, method);
  FitResult out;
  out.scores = stat.pi;
  out.kind = ScoreKind::Distribution;
  out.ranking = ranking_from_scores(out.scores);
  out.iterations = stat.iterations;
  out.converged = true;
  out.final_grad_norm = stat.residual;
  return out;
}

}  // namespace btl
