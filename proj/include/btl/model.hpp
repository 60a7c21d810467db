#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "btl/errors.hpp"

namespace btl {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Logistic link psi(t) = 1 / (1 + exp(-t)).
///
/// Evaluated on the branch that never exponentiates a positive argument, so
/// the result stays accurate (and free of overflow) for |t| well past 700.
template <typename Scalar>
Scalar sigmoid(Scalar t) {
  using std::exp;
  if (t >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-t));
  const Scalar e = exp(t);
  return e / (Scalar(1) + e);
}

/// psi'(t) = psi(t) psi(-t); even, maximal value 1/4 at t = 0.
template <typename Scalar>
Scalar sigmoid_prime(Scalar t) {
  return sigmoid(t) * sigmoid(-t);
}

/// log(1 / psi(t)) = log(1 + exp(-t)), stable for both signs of t.
template <typename Scalar>
Scalar log1p_exp_neg(Scalar t) {
  using std::exp;
  using std::log1p;
  if (t >= Scalar(0)) return log1p(exp(-t));
  return -t + log1p(exp(t));
}

enum class SpaceKind { Standard, Enlarged };

/// Sorted skill vector theta* (nonincreasing) with the parameter-space
/// metadata it was declared under. `values` are natural-log skills.
struct SkillProfile {
  Vector<double> values;
  int k = 1;
  double delta = 0.0;
  double kappa = 0.0;
  SpaceKind space_kind = SpaceKind::Standard;

  int n() const { return static_cast<int>(values.size()); }
};

/// Rank vector: ranks[i] is the 1-based rank of (0-based) player i.
class Ranking {
 public:
  Ranking() = default;
  /// Throws InvalidArgument unless `ranks` is a permutation of 1..n.
  explicit Ranking(std::vector<int> ranks);

  static Ranking identity(int n);

  int n() const { return static_cast<int>(ranks_.size()); }
  int operator[](int player) const { return ranks_[static_cast<std::size_t>(player)]; }
  std::span<const int> ranks() const { return ranks_; }
  /// order()[r-1] is the player holding rank r.
  std::vector<int> order() const;

  bool operator==(const Ranking&) const = default;

 private:
  std::vector<int> ranks_;
};

/// Score vector with 1^T theta = 0.
class CenteredScores {
 public:
  CenteredScores() = default;
  /// Throws InvalidArgument on an empty or non-finite input.
  explicit CenteredScores(const Vector<double>& theta);

  const Vector<double>& theta() const { return theta_; }
  int n() const { return static_cast<int>(theta_.size()); }

 private:
  Vector<double> theta_;
};

struct ProfileCheck {
  bool ok = true;
  std::string violation;  // empty when ok

  explicit operator bool() const { return ok; }
};

/// Checks `profile` against Theta(k, delta, kappa) (or the enlarged space
/// Theta', where the gap is measured between theta_k and theta_{k+2}).
/// Reports the first violated constraint by name: "length", "k-range",
/// "non-finite", "monotonicity", "delta-exceeds-kappa", "gap", "range".
ProfileCheck validate_profile(const SkillProfile& profile);

/// Absolute slack used by the gap and range checks.
inline constexpr double kProfileTolerance = 1e-12;

CenteredScores center(const Vector<double>& theta);

/// Higher score gets the smaller (better) rank; ties go to the lower index.
/// Throws InvalidArgument on NaN.
Ranking ranking_from_scores(const Vector<double>& scores);

/// theta*_{r*_i} for every player i, i.e. the skill each player actually has.
Vector<double> player_skills(const SkillProfile& profile, const Ranking& truth);

}  // namespace btl
