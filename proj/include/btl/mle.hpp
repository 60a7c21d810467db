#pragma once

#include <optional>
#include <variant>

#include "btl/likelihood.hpp"

namespace btl {

struct Vanilla {};
struct Regularized {
  double lambda = 0.0;
};
struct BoxConstrained {
  double bound = 40.0;
};
using MleMode = std::variant<Vanilla, Regularized, BoxConstrained>;

enum class Solver { Newton, GradientDescent };

struct MleOptions {
  MleMode mode = Vanilla{};
  double grad_tol = 1e-10;
  /// 0 selects the solver default: 200 for Newton, 10^6 for gradient descent.
  int max_iters = 0;
  Solver solver = Solver::Newton;
  /// Starting point; the zero vector when absent. Centered before use.
  std::optional<Vector<double>> initial;
};

/// Vanilla fits abort once ||theta||_inf passes this value.
inline constexpr double kDivergenceGuard = 40.0;

enum class ScoreKind { Theta, Distribution };

/// Estimated scores plus the ranking they induce. `scores` is a centered
/// theta for the MLE and a probability vector for the spectral method.
struct FitResult {
  Vector<double> scores;
  ScoreKind kind = ScoreKind::Theta;
  Ranking ranking;
  int iterations = 0;
  bool converged = false;
  bool boundary_hit = false;
  /// MLE: optimality residual (inf-norm of the (projected) gradient).
  /// Spectral: l1 stationarity residual.
  double final_grad_norm = 0.0;
};

/// Minimizes l_n(theta) (+ lambda/2 ||theta||^2, or over ||theta||_inf <= bound)
/// on the subspace 1^T theta = 0.
///
/// Throws DisconnectedGraph when the comparison graph is not connected and,
/// in Vanilla mode, Diverged when the iterates leave ||theta||_inf <= 40
/// (the likelihood has no finite minimizer). Hitting max_iters is reported
/// through `converged = false`, not an exception.
FitResult fit_mle(const ComparisonDataset& data, const MleOptions& options = {});

/// (1/k) min_t [#{top-k players with score <= t} + #{others with score >= t}],
/// scanning every threshold between consecutive distinct scores.
double topk_threshold_error(const Vector<double>& scores, const Ranking& truth, int k);

}  // namespace btl
