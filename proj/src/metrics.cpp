#include "btl/metrics.hpp"

#include <algorithm>
#include <vector>

namespace btl {

namespace {

void check_same_size(const Ranking& a, const Ranking& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::DimensionMismatch, "rankings have different lengths");
}

void check_k(int k, int n) {
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n]");
}

std::int64_t count_inversions(std::vector<int>& v, std::vector<int>& scratch, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t count = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[a] <= v[b]) {
      scratch[out++] = v[a++];
    } else {
      count += static_cast<std::int64_t>(mid - a);
      scratch[out++] = v[b++];
    }
  }
  while (a < mid) scratch[out++] = v[a++];
  while (b < hi) scratch[out++] = v[b++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

}  // namespace

double hamming_topk(const Ranking& estimate, const Ranking& truth, int k) {
  check_same_size(estimate, truth);
  check_k(k, truth.n());
  int mismatched = 0;
  for (int i = 0; i < truth.n(); ++i) {
    mismatched += ((estimate[i] <= k) != (truth[i] <= k)) ? 1 : 0;
  }
  return static_cast<double>(mismatched) / (2.0 * k);
}

std::int64_t kendall_tau(const Ranking& estimate, const Ranking& truth) {
  check_same_size(estimate, truth);
  // Walk players in true order; discordant pairs are inversions of r-hat.
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(truth.n()));
  for (int player : truth.order()) seq.push_back(estimate[player]);
  std::vector<int> scratch(seq.size());
  return count_inversions(seq, scratch, 0, seq.size());
}

bool exact_recovery(const Ranking& estimate, const Ranking& truth, int k) {
  return hamming_topk(estimate, truth, k) == 0.0;
}

EstimationErrors estimation_errors(const CenteredScores& estimate, const SkillProfile& profile,
                                   const Ranking& truth) {
  if (estimate.n() != profile.n()) {
    throw Error(ErrorCode::DimensionMismatch, "estimate and profile lengths differ");
  }
  const Vector<double> target = center(player_skills(profile, truth)).theta();
  const Vector<double> diff = center(estimate.theta()).theta() - target;
  const double linf = diff.lpNorm<Eigen::Infinity>();
  return {diff.squaredNorm(), linf * linf};
}

EvalReport evaluate(const Ranking& estimate, const Ranking& truth, int k) {
  EvalReport r;
  r.hamming_topk = hamming_topk(estimate, truth, k);
  r.exact_recovery = r.hamming_topk == 0.0;
  r.kendall = kendall_tau(estimate, truth);
  return r;
}

EvalReport evaluate(const CenteredScores& estimate, const SkillProfile& profile,
                    const Ranking& truth) {
  EvalReport r = evaluate(ranking_from_scores(estimate.theta()), truth, profile.k);
  r.errors = estimation_errors(estimate, profile, truth);
  return r;
}

}  // namespace btl
