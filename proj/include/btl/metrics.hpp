#pragma once

#include <cstdint>
#include <optional>

#include "btl/model.hpp"

namespace btl {

/// |top-k set difference| / (2k): lies on the lattice {0, 1/(2k), ..., 1}.
double hamming_topk(const Ranking& estimate, const Ranking& truth, int k);

/// Number of discordant pairs, counted by merge sort in O(n log n).
std::int64_t kendall_tau(const Ranking& estimate, const Ranking& truth);

/// True iff the two top-k sets coincide.
bool exact_recovery(const Ranking& estimate, const Ranking& truth, int k);

struct EstimationErrors {
  double l2_sq = 0.0;
  double linf_sq = 0.0;
};

/// Squared l2 and squared l_inf distance between theta-hat and theta*_{r*},
/// after centering both.
EstimationErrors estimation_errors(const CenteredScores& estimate, const SkillProfile& profile,
                                   const Ranking& truth);

struct EvalReport {
  double hamming_topk = 0.0;
  bool exact_recovery = false;
  std::int64_t kendall = 0;
  /// Absent when the scores are not on the theta scale (spectral output).
  std::optional<EstimationErrors> errors;
};

EvalReport evaluate(const Ranking& estimate, const Ranking& truth, int k);
EvalReport evaluate(const CenteredScores& estimate, const SkillProfile& profile,
                    const Ranking& truth);

}  // namespace btl
