#include "btl/io.hpp"

#include <istream>
#include <ostream>

#include "text.hpp"

namespace btl {

namespace {

// Rows `i value rank` with i = 1..n in order.
void read_rows(text::LineReader& lines, std::string& line, bool stop_at_method,
               std::vector<double>& values, std::vector<int>& ranks, bool& pending) {
  pending = false;
  while (lines.next(line)) {
    if (stop_at_method && line.rfind("method", 0) == 0) {
      pending = true;
      return;
    }
    const auto f = text::split_ws(line);
    if (f.size() != 3) throw Error(ErrorCode::Parse, "expected `i value rank` at line " + std::to_string(lines.line_number()));
    const int i = text::parse<int>(f[0], "player index");
    if (i != static_cast<int>(values.size()) + 1) throw Error(ErrorCode::Parse, "player indices must run 1..n in order");
    values.push_back(text::parse<double>(f[1], "value"));
    ranks.push_back(text::parse<int>(f[2], "rank"));
  }
}

Vector<double> to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector<double>>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

SkillProfile Truth::profile(int k) const {
  SkillProfile out;
  out.values.resize(skills.size());
  for (int i = 0; i < ranking.n(); ++i) out.values[ranking[i] - 1] = skills[i];
  out.k = k;
  const int n = out.n();
  if (k >= 1 && k < n) out.delta = out.values[k - 1] - out.values[k];
  if (n > 0) out.kappa = out.values[0] - out.values[n - 1];
  return out;
}

void write_truth(std::ostream& os, const SkillProfile& profile, const Ranking& truth) {
  const Vector<double> skills = player_skills(profile, truth);
  for (int i = 0; i < truth.n(); ++i) {
    os << i + 1 << ' ' << text::format_exact(skills[i]) << ' ' << truth[i] << '\n';
  }
}

Truth read_truth(std::istream& is) {
  text::LineReader lines(is);
  std::string line;
  std::vector<double> values;
  std::vector<int> ranks;
  bool pending = false;
  read_rows(lines, line, false, values, ranks, pending);
  if (values.empty()) throw Error(ErrorCode::Parse, "truth file has no players");
  return {to_vector(values), Ranking(std::move(ranks))};
}

void write_scores(std::ostream& os, std::string_view method, const FitResult& fit) {
  os << "method " << method << '\n';
  for (Eigen::Index i = 0; i < fit.scores.size(); ++i) {
    os << i + 1 << ' ' << text::format_exact(fit.scores[i]) << ' ' << fit.ranking[static_cast<int>(i)] << '\n';
  }
}

std::vector<ScoreBlock> read_scores(std::istream& is) {
  text::LineReader lines(is);
  std::string line;
  std::vector<ScoreBlock> out;
  bool pending = lines.next(line);
  while (pending) {
    const auto head = text::split_ws(line);
    if (head.size() != 2 || head[0] != "method") throw Error(ErrorCode::Parse, "scores: expected `method <name>`");
    std::vector<double> values;
    std::vector<int> ranks;
    read_rows(lines, line, true, values, ranks, pending);
    if (values.empty()) throw Error(ErrorCode::Parse, "scores: empty block for " + head[1]);
    out.push_back({head[1], to_vector(values), Ranking(std::move(ranks))});
  }
  if (out.empty()) throw Error(ErrorCode::Parse, "scores file has no blocks");
  return out;
}

}  // namespace btl
