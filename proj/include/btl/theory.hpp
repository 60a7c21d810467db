#pragma once

// Closed-form recovery theory: effective variances of the two estimators,
// signal-to-noise ratios, partial-recovery error exponents and the exact
// recovery phase boundary. Unspecified constants in the asymptotic bounds
// are dropped (C = 1, epsilon = delta = 0), so every value here is the
// limiting idealization and should be read as an order-of-magnitude guide at
// finite n. The formulas are calibrated for bounded dynamic range kappa.

#include <cmath>

#include "btl/model.hpp"

namespace btl {

enum class Method { Mle, Spectral };

/// n / (k psi'(kappa1) + (n - k) psi'(kappa2)).
template <typename Scalar>
Scalar mle_variance_objective(int n, int k, Scalar kappa1, Scalar kappa2) {
  return Scalar(n) / (Scalar(k) * sigmoid_prime(kappa1) + Scalar(n - k) * sigmoid_prime(kappa2));
}

/// [k psi'(k1)(1+e^k1)^2 + (n-k) psi'(k2)(1+e^-k2)^2] / [(k psi(k1) + (n-k) psi(-k2))^2 / n].
template <typename Scalar>
Scalar spectral_variance_objective(int n, int k, Scalar kappa1, Scalar kappa2) {
  using std::exp;
  const Scalar a = Scalar(1) + exp(kappa1);
  const Scalar b = Scalar(1) + exp(-kappa2);
  const Scalar num = Scalar(k) * sigmoid_prime(kappa1) * a * a +
                     Scalar(n - k) * sigmoid_prime(kappa2) * b * b;
  const Scalar den = Scalar(k) * sigmoid(kappa1) + Scalar(n - k) * sigmoid(-kappa2);
  return num / (den * den / Scalar(n));
}

struct VarianceResult {
  double value = 4.0;
  double kappa1 = 0.0;  // argmax
  double kappa2 = 0.0;
};

/// V(kappa): max of the MLE objective over kappa1 + kappa2 <= kappa. The
/// objective increases in both arguments, so the search runs along
/// kappa1 + kappa2 = kappa (dense 1D grid, then golden-section).
VarianceResult variance_mle(int n, int k, double kappa);

/// V-bar(kappa): full 2D grid (1000 x 1000 over the feasible triangle) then
/// Nelder-Mead plus boundary refinement around the best cell.
VarianceResult variance_spectral(int n, int k, double kappa);

VarianceResult effective_variance(int n, int k, double kappa, Method method);

struct TheoryInput {
  int n = 200;
  int k = 50;
  double p = 0.25;
  int L = 20;
  double delta = 0.0;
  double kappa = 0.0;
};

/// Throws InvalidArgument unless 1 <= k <= n/2, 0 < p <= 1, L >= 1 and
/// 0 <= delta <= kappa.
void validate(const TheoryInput& input);

/// n p L delta^2 / V(kappa), or with V-bar for the spectral method.
double snr(const TheoryInput& input, Method method);

struct RecoveryExponent {
  double exponent = 0.0;  // E
  double bound = 1.0;     // exp(-E), no leading constant
};

/// E = (1/2) (sqrt(SNR)/2 - log((n-k)/k)/sqrt(SNR))_+^2.
RecoveryExponent partial_recovery_exponent(double snr_value, int n, int k);

struct Threshold {
  double delta_crit = 0.0;
  /// k = 1 and n - k = 1: both logarithms vanish and so does the threshold.
  bool degenerate = false;
};

/// Delta at which n p L Delta^2 / Var = 2 (sqrt(log k) + sqrt(log(n-k)))^2.
Threshold exact_recovery_threshold(int n, int k, double kappa, double p, int L, Method method);

/// Threshold for designs whose dynamic range equals the gap (two-piece
/// skills): the fixed point Delta = delta_crit(kappa = Delta).
Threshold exact_recovery_threshold_two_piece(int n, int k, double p, int L, Method method);

}  // namespace btl
