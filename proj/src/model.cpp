#include "btl/model.hpp"

#include <algorithm>
#include <numeric>

namespace btl {

Ranking::Ranking(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  const int n = static_cast<int>(ranks_.size());
  std::vector<char> seen(ranks_.size(), 0);
  for (int r : ranks_) {
    if (r < 1 || r > n || seen[static_cast<std::size_t>(r - 1)]) {
      throw Error(ErrorCode::InvalidArgument, "ranks are not a permutation of 1..n");
    }
    seen[static_cast<std::size_t>(r - 1)] = 1;
  }
}

Ranking Ranking::identity(int n) {
  std::vector<int> ranks(static_cast<std::size_t>(n));
  std::iota(ranks.begin(), ranks.end(), 1);
  return Ranking(std::move(ranks));
}

std::vector<int> Ranking::order() const {
  std::vector<int> out(ranks_.size());
  for (std::size_t i = 0; i < ranks_.size(); ++i) {
    out[static_cast<std::size_t>(ranks_[i] - 1)] = static_cast<int>(i);
  }
  return out;
}

CenteredScores::CenteredScores(const Vector<double>& theta) {
  if (theta.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty score vector");
  if (!theta.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite score");
  theta_ = theta.array() - theta.mean();
}

CenteredScores center(const Vector<double>& theta) { return CenteredScores(theta); }

ProfileCheck validate_profile(const SkillProfile& profile) {
  const auto fail = [](const char* what) { return ProfileCheck{false, what}; };
  const auto& v = profile.values;
  const int n = profile.n();
  if (n < 2) return fail("length");
  if (profile.k < 1 || profile.k >= n) return fail("k-range");
  if (profile.space_kind == SpaceKind::Enlarged && profile.k + 1 >= n) return fail("k-range");
  if (!v.allFinite() || !std::isfinite(profile.delta) || !std::isfinite(profile.kappa)) {
    return fail("non-finite");
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (v[i] < v[i + 1]) return fail("monotonicity");
  }
  if (profile.delta < 0.0 || profile.kappa < 0.0 ||
      profile.delta > profile.kappa + kProfileTolerance) {
    return fail("delta-exceeds-kappa");
  }
  const int k = profile.k;
  const double gap = profile.space_kind == SpaceKind::Standard ? v[k - 1] - v[k]
                                                               : v[k - 1] - v[k + 1];
  if (gap < profile.delta - kProfileTolerance) return fail("gap");
  if (v[0] - v[n - 1] > profile.kappa + kProfileTolerance) return fail("range");
  return {};
}

Ranking ranking_from_scores(const Vector<double>& scores) {
  const auto n = static_cast<std::size_t>(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw Error(ErrorCode::InvalidArgument, "NaN score");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  std::vector<int> ranks(n);
  for (std::size_t r = 0; r < n; ++r) ranks[static_cast<std::size_t>(order[r])] = static_cast<int>(r) + 1;
  return Ranking(std::move(ranks));
}

Vector<double> player_skills(const SkillProfile& profile, const Ranking& truth) {
  if (truth.n() != profile.n()) {
    throw Error(ErrorCode::DimensionMismatch, "ranking and profile lengths differ");
  }
  Vector<double> out(profile.n());
  for (int i = 0; i < profile.n(); ++i) out[i] = profile.values[truth[i] - 1];
  return out;
}

}  // namespace btl
