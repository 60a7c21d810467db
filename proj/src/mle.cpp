#include "btl/mle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace btl {

namespace {

struct Problem {
  const ComparisonDataset& data;
  double lambda = 0.0;
  std::optional<double> bound;  // box half-width

  double value(const Vector<double>& theta) const {
    return neg_log_likelihood(data, theta) + 0.5 * lambda * theta.squaredNorm();
  }
  Vector<double> grad(const Vector<double>& theta) const {
    return gradient(data, theta) + lambda * theta;
  }
  Matrix<double> hess(const Vector<double>& theta) const {
    Matrix<double> h = hessian(data, theta);
    h.diagonal().array() += lambda;
    return h;
  }
};

// Euclidean projection onto {x : 1^T x = 0, |x_i| <= bound}. The shift mu
// solving sum_i clip(v_i - mu) = 0 is found by bisection (the sum is monotone).
Vector<double> project_box(const Vector<double>& v, double bound) {
  const auto clipped_sum = [&](double mu) {
    return (v.array() - mu).cwiseMax(-bound).cwiseMin(bound).sum();
  };
  double lo = v.minCoeff() - bound;
  double hi = v.maxCoeff() + bound;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (clipped_sum(mid) > 0.0 ? lo : hi) = mid;
  }
  Vector<double> x = (v.array() - 0.5 * (lo + hi)).cwiseMax(-bound).cwiseMin(bound);
  // Spread the leftover rounding error over the interior coordinates.
  const auto interior = (x.array().abs() < bound).count();
  if (interior > 0) {
    const double excess = x.sum() / static_cast<double>(interior);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) < bound) x[i] -= excess;
    }
  }
  return x;
}

double optimality_residual(const Problem& prob, const Vector<double>& theta,
                           const Vector<double>& g) {
  if (prob.bound) return (theta - project_box(theta - g, *prob.bound)).lpNorm<Eigen::Infinity>();
  return g.lpNorm<Eigen::Infinity>();
}

Vector<double> take_step(const Problem& prob, const Vector<double>& theta,
                         const Vector<double>& dir, double t) {
  Vector<double> next = theta + t * dir;
  if (prob.bound) return project_box(next, *prob.bound);
  return next.array() - next.mean();
}

// Newton direction restricted to the free coordinates, keeping 1^T d = 0:
//   [H_FF 1; 1^T 0] [d_F; nu] = [-g_F; 0].
std::optional<Vector<double>> newton_direction(const Problem& prob, const Vector<double>& theta,
                                               const Vector<double>& g) {
  const Eigen::Index n = theta.size();
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (prob.bound) {
      const double b = *prob.bound;
      if ((theta[i] >= b - 1e-12 && g[i] < 0.0) || (theta[i] <= -b + 1e-12 && g[i] > 0.0)) continue;
    }
    free.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(free.size());
  if (m < 2) return std::nullopt;
  const Matrix<double> h = prob.hess(theta);
  Matrix<double> kkt = Matrix<double>::Zero(m + 1, m + 1);
  Vector<double> rhs = Vector<double>::Zero(m + 1);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) kkt(a, b) = h(free[a], free[b]);
    kkt(a, m) = kkt(m, a) = 1.0;
    rhs[a] = -g[free[a]];
  }
  const Vector<double> sol = kkt.partialPivLu().solve(rhs);
  if (!sol.allFinite()) return std::nullopt;
  Vector<double> d = Vector<double>::Zero(n);
  for (Eigen::Index a = 0; a < m; ++a) d[free[a]] = sol[a];
  return d;
}

struct LineSearchResult {
  Vector<double> theta;
  double value;
  Vector<double> grad;
};

// Armijo backtracking (slope 1e-4, factor 0.5) along the (projected) path.
// Near the optimum the decrease drops below the rounding floor of l_n, so a
// step that keeps the value within that floor while shrinking the gradient is
// also taken.
std::optional<LineSearchResult> backtrack(const Problem& prob, const Vector<double>& theta,
                                          double f0, const Vector<double>& g0, double res0,
                                          const Vector<double>& dir, double t0) {
  constexpr double kSlope = 1e-4;
  const double floor = 1e-12 * std::max(1.0, std::abs(f0));
  double t = t0;
  for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
    Vector<double> next = take_step(prob, theta, dir, t);
    const double slope = g0.dot(next - theta);
    if (slope >= 0.0) {
      if (!prob.bound) break;
      continue;
    }
    const double f = prob.value(next);
    if (!std::isfinite(f)) continue;
    if (f <= f0 + kSlope * slope) return LineSearchResult{next, f, prob.grad(next)};
    if (f <= f0 + floor) {
      Vector<double> g = prob.grad(next);
      if (optimality_residual(prob, next, g) < res0) return LineSearchResult{next, f, std::move(g)};
    }
  }
  return std::nullopt;
}

void check_divergence(const MleOptions& options, const Vector<double>& theta) {
  if (std::holds_alternative<Vanilla>(options.mode) &&
      theta.lpNorm<Eigen::Infinity>() > kDivergenceGuard) {
    throw Error(ErrorCode::Diverged,
                "||theta||_inf exceeded 40; the likelihood has no finite minimizer "
                "(some group of players won or lost every game)");
  }
}

// A finite maximizer exists iff the "beat at least once" digraph is strongly
// connected: otherwise some group won (or lost) every game against the rest.
bool wins_strongly_connected(const ComparisonDataset& data) {
  const int n = data.n();
  std::vector<std::vector<int>> fwd(static_cast<std::size_t>(n)), rev(static_cast<std::size_t>(n));
  const auto& edges = data.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (data.wins()[e] > 0) {
      fwd[i].push_back(j);
      rev[j].push_back(i);
    }
    if (data.wins()[e] < data.games_per_edge()) {
      fwd[j].push_back(i);
      rev[i].push_back(j);
    }
  }
  const auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(rev);
}

}  // namespace

FitResult fit_mle(const ComparisonDataset& data, const MleOptions& options) {
  const int n = data.n();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "fit_mle needs at least two players");
  if (!(options.grad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tol must be positive");
  if (!data.graph().connected()) {
    throw Error(ErrorCode::DisconnectedGraph, "comparison graph is not connected; scores are unidentifiable");
  }

  Problem prob{data, 0.0, std::nullopt};
  if (const auto* reg = std::get_if<Regularized>(&options.mode)) {
    if (!(reg->lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
    prob.lambda = reg->lambda;
  } else if (const auto* box = std::get_if<BoxConstrained>(&options.mode)) {
    if (!(box->bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "box bound must be positive");
    prob.bound = box->bound;
  }
  if (prob.lambda == 0.0 && !prob.bound && !wins_strongly_connected(data)) {
    throw Error(ErrorCode::Diverged,
                "the likelihood has no finite minimizer: some group of players won or lost every game "
                "against the rest");
  }

  const int max_iters = options.max_iters > 0
                            ? options.max_iters
                            : (options.solver == Solver::Newton ? 200 : 1'000'000);
  const double np = data.graph().p() ? n * *data.graph().p()
                                     : 2.0 * static_cast<double>(data.graph().num_edges()) / n;
  const double gd_step = 1.0 / (prob.lambda + np);

  Vector<double> theta = Vector<double>::Zero(n);
  if (options.initial) {
    if (options.initial->size() != n) throw Error(ErrorCode::DimensionMismatch, "initial theta length");
    theta = center(*options.initial).theta();
  }
  if (prob.bound) theta = project_box(theta, *prob.bound);

  double f = prob.value(theta);
  Vector<double> g = prob.grad(theta);
  double res = optimality_residual(prob, theta, g);

  FitResult out;
  int iter = 0;
  while (res > options.grad_tol && iter < max_iters) {
    std::optional<LineSearchResult> step;
    if (options.solver == Solver::Newton) {
      if (auto dir = newton_direction(prob, theta, g)) step = backtrack(prob, theta, f, g, res, *dir, 1.0);
      if (!step) {
        const Vector<double> dir = -(g.array() - g.mean()).matrix();
        step = backtrack(prob, theta, f, g, res, dir, gd_step);
      }
      if (!step) break;  // stalled at the rounding floor
      theta = std::move(step->theta);
      f = step->value;
      g = std::move(step->grad);
    } else {
      theta = take_step(prob, theta, -(g.array() - g.mean()).matrix(), gd_step);
      f = prob.value(theta);
      g = prob.grad(theta);
    }
    ++iter;
    check_divergence(options, theta);
    res = optimality_residual(prob, theta, g);
  }

  out.iterations = iter;
  out.converged = res <= options.grad_tol;
  out.final_grad_norm = res;
  out.boundary_hit = prob.bound && theta.lpNorm<Eigen::Infinity>() >= *prob.bound - 1e-9;
  out.scores = std::move(theta);
  out.kind = ScoreKind::Theta;
  out.ranking = ranking_from_scores(out.scores);
  return out;
}

double topk_threshold_error(const Vector<double>& scores, const Ranking& truth, int k) {
  const int n = static_cast<int>(scores.size());
  if (truth.n() != n) throw Error(ErrorCode::DimensionMismatch, "scores and ranking lengths differ");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n]");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });

  const int bottom_total = n - k;
  int best = bottom_total;  // threshold below every score
  int top_le = 0;
  int bottom_le = 0;
  for (std::size_t at = 0; at < order.size();) {
    std::size_t end = at;
    while (end < order.size() && scores[order[end]] == scores[order[at]]) {
      (truth[order[end]] <= k ? top_le : bottom_le) += 1;
      ++end;
    }
    // threshold strictly between this score level and the next one up
    best = std::min(best, top_le + (bottom_total - bottom_le));
    at = end;
  }
  return static_cast<double>(best) / k;
}

}  // namespace btl
