#pragma once

// Line formats used by the command-line tool besides the dataset format.
//
//   truth file:  `i theta_star rank_star` per player (1-based i)
//   scores file: one block per method, `method <name>` followed by
//                `i score rank` per player
//
// `#` lines are comments. Reals are written in shortest round-trip form.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "btl/mle.hpp"

namespace btl {

inline constexpr std::string_view kVersion = "0.1.0";

struct Truth {
  Vector<double> skills;  // theta*_{r*_i} per player
  Ranking ranking;

  /// Sorted profile (values in rank order) declared with the given k; delta
  /// and kappa are the observed gap and range.
  SkillProfile profile(int k) const;
};

void write_truth(std::ostream& os, const SkillProfile& profile, const Ranking& truth);
Truth read_truth(std::istream& is);

struct ScoreBlock {
  std::string method;
  Vector<double> scores;
  Ranking ranking;
};

void write_scores(std::ostream& os, std::string_view method, const FitResult& fit);
std::vector<ScoreBlock> read_scores(std::istream& is);

}  // namespace btl
