#include "btl/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "text.hpp"

namespace btl {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[static_cast<std::size_t>(a)] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

SkillProfile make_profile(Vector<double> values, int k, double delta, double kappa) {
  SkillProfile profile{std::move(values), k, delta, kappa, SpaceKind::Standard};
  if (auto check = validate_profile(profile); !check) {
    throw Error(ErrorCode::Infeasible, "design violates " + check.violation);
  }
  return profile;
}

void check_design_size(int n, int k) {
  if (n < 2 || k < 1 || k >= n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k < n");
}

// Sizes like 50 * 0.9 must be integral; anything else would silently move
// players between groups.
int integral_size(double x, const char* what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) {
    throw Error(ErrorCode::Infeasible, std::string("non-integer piece size for ") + what);
  }
  return static_cast<int>(r);
}

Vector<double> pieces(std::initializer_list<std::pair<int, double>> spec) {
  int n = 0;
  for (const auto& [size, value] : spec) n += size;
  Vector<double> v(n);
  int at = 0;
  for (const auto& [size, value] : spec) {
    v.segment(at, size).setConstant(value);
    at += size;
  }
  return v;
}

}  // namespace

ComparisonGraph::ComparisonGraph(int n, std::vector<Edge> edges, std::optional<double> p)
    : n_(n), p_(p), edges_(std::move(edges)) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "graph needs at least one vertex");
  if (p && !(*p > 0.0 && *p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  for (auto& e : edges_) {
    if (e.i == e.j) throw Error(ErrorCode::InvalidArgument, "self-loop");
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= n) throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate edge");
  }
}

std::optional<std::size_t> ComparisonGraph::find(int a, int b) const {
  const Edge key = a < b ? Edge{a, b} : Edge{b, a};
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::vector<int> ComparisonGraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.i)];
    ++deg[static_cast<std::size_t>(e.j)];
  }
  return deg;
}

bool ComparisonGraph::connected() const {
  DisjointSets sets(n_);
  int components = n_;
  for (const auto& e : edges_) components -= sets.unite(e.i, e.j) ? 1 : 0;
  return components == 1;
}

ComparisonDataset::ComparisonDataset(ComparisonGraph graph, int games_per_edge,
                                     std::vector<int> wins, RngSeed origin)
    : graph_(std::move(graph)), games_(games_per_edge), wins_(std::move(wins)), origin_(origin) {
  if (games_ < 1) throw Error(ErrorCode::InvalidArgument, "L must be at least 1");
  if (wins_.size() != graph_.num_edges()) {
    throw Error(ErrorCode::DimensionMismatch, "one win count per edge required");
  }
  for (int w : wins_) {
    if (w < 0 || w > games_) throw Error(ErrorCode::InvalidArgument, "win count outside [0, L]");
  }
}

double ComparisonDataset::ybar(int a, int b) const {
  const auto e = graph_.find(a, b);
  if (!e) throw Error(ErrorCode::InvalidArgument, "pair is not an edge");
  const double y = ybar(*e);
  return a < b ? y : 1.0 - y;
}

std::uint64_t ComparisonDataset::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(graph_.n()));
  feed(static_cast<std::uint64_t>(games_));
  for (std::size_t e = 0; e < wins_.size(); ++e) {
    feed(static_cast<std::uint64_t>(graph_.edges()[e].i));
    feed(static_cast<std::uint64_t>(graph_.edges()[e].j));
    feed(static_cast<std::uint64_t>(wins_[e]));
  }
  return h;
}

bool ComparisonDataset::operator==(const ComparisonDataset& other) const {
  return graph_.n() == other.graph_.n() && graph_.p() == other.graph_.p() &&
         graph_.edges() == other.graph_.edges() && games_ == other.games_ &&
         wins_ == other.wins_ && origin_ == other.origin_;
}

ComparisonGraph sample_graph(int n, double p, RngSeed rng) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "sample_graph needs n >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  CounterRng gen(rng);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(p * n * (n - 1) / 2 * 1.1) + 16);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (gen.bernoulli(p)) edges.push_back({i, j});
    }
  }
  return ComparisonGraph(n, std::move(edges), p);
}

ComparisonDataset sample_comparisons(const ComparisonGraph& graph, const SkillProfile& profile,
                                     const Ranking& truth, int games_per_edge, RngSeed rng) {
  if (graph.n() != profile.n() || graph.n() != truth.n()) {
    throw Error(ErrorCode::DimensionMismatch, "graph, profile and ranking sizes differ");
  }
  if (games_per_edge < 1) throw Error(ErrorCode::InvalidArgument, "L must be at least 1");
  const Vector<double> skill = player_skills(profile, truth);
  CounterRng gen(rng);
  std::vector<int> wins;
  wins.reserve(graph.num_edges());
  for (const auto& e : graph.edges()) {
    const double prob = sigmoid(skill[e.i] - skill[e.j]);
    int w = 0;
    for (int l = 0; l < games_per_edge; ++l) w += gen.bernoulli(prob) ? 1 : 0;
    wins.push_back(w);
  }
  return ComparisonDataset(graph, games_per_edge, std::move(wins), rng);
}

SkillProfile design_four_piece_tau(double tau, double delta, int n, int k) {
  check_design_size(n, k);
  if (!(tau >= 0.0) || !(delta >= 0.0) || tau + delta > 10.0) {
    throw Error(ErrorCode::Infeasible, "four-piece tau design needs tau, delta >= 0 and tau + delta <= 10");
  }
  const int top = k / 2;
  const int bottom = (n - k) / 2;
  return make_profile(pieces({{top, 10.0},
                              {k - top, 10.0 - tau},
                              {bottom, 10.0 - tau - delta},
                              {n - k - bottom, 0.0}}),
                      k, delta, 10.0);
}

SkillProfile design_four_piece_rho(double rho, double delta, int n, int k) {
  check_design_size(n, k);
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::Infeasible, "rho must lie in [0, 1]");
  if (!(delta >= 0.0 && delta <= 6.0)) throw Error(ErrorCode::Infeasible, "delta must lie in [0, 6]");
  const int s1 = integral_size(k * (1.0 - rho), "k(1-rho)");
  const int s3 = integral_size((n - k) * (1.0 - rho), "(n-k)(1-rho)");
  return make_profile(pieces({{s1, 10.0}, {k - s1, 6.0}, {s3, 6.0 - delta}, {n - k - s3, 0.0}}),
                      k, delta, 10.0);
}

SkillProfile design_random_uniform(double delta, RngSeed rng, int n, int k) {
  check_design_size(n, k);
  if (k < 1 || n - k < 2) throw Error(ErrorCode::InvalidArgument, "random design needs n - k >= 2");
  if (!(delta > 0.0 && delta < 6.0)) throw Error(ErrorCode::Infeasible, "delta must lie in (0, 6)");
  CounterRng gen(rng);
  Vector<double> v(n);
  v[0] = 10.0;
  v[n - 1] = 0.0;
  for (int i = 1; i < k; ++i) v[i] = 6.0 + 4.0 * gen.uniform();
  for (int i = k; i < n - 1; ++i) v[i] = (6.0 - delta) * gen.uniform();
  std::sort(v.data() + 1, v.data() + k, std::greater<>());
  std::sort(v.data() + k, v.data() + n - 1, std::greater<>());
  return make_profile(std::move(v), k, delta, 10.0);
}

SkillProfile design_two_piece(double delta, int n, int k) {
  check_design_size(n, k);
  if (!(delta >= 0.0)) throw Error(ErrorCode::Infeasible, "delta must be nonnegative");
  return make_profile(pieces({{k, delta}, {n - k, 0.0}}), k, delta, delta);
}

Ranking random_ranking(int n, RngSeed rng) {
  std::vector<int> ranks(static_cast<std::size_t>(n));
  std::iota(ranks.begin(), ranks.end(), 1);
  CounterRng gen(rng);
  for (std::size_t i = ranks.size(); i > 1; --i) {
    std::swap(ranks[i - 1], ranks[gen.below(i)]);
  }
  return Ranking(std::move(ranks));
}

void write_dataset(std::ostream& os, const ComparisonDataset& data) {
  const auto& g = data.graph();
  os << g.n() << ' ' << (g.p() ? text::format_exact(*g.p()) : std::string("-")) << ' '
     << data.games_per_edge() << ' ' << data.origin().seed << ' ' << data.origin().stream_id
     << '\n';
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    os << g.edges()[e].i + 1 << ' ' << g.edges()[e].j + 1 << ' ' << data.wins()[e] << '\n';
  }
}

ComparisonDataset read_dataset(std::istream& is) {
  text::LineReader lines(is);
  std::string line;
  if (!lines.next(line)) throw Error(ErrorCode::Parse, "dataset: missing header");
  const auto head = text::split_ws(line);
  if (head.size() != 5) throw Error(ErrorCode::Parse, "dataset: header must be `n p L seed stream`");
  const int n = text::parse<int>(head[0], "n");
  std::optional<double> p;
  if (head[1] != "-") p = text::parse<double>(head[1], "p");
  const int games = text::parse<int>(head[2], "L");
  const RngSeed origin{text::parse<std::uint64_t>(head[3], "seed"),
                       text::parse<std::uint64_t>(head[4], "stream")};
  std::vector<Edge> edges;
  std::vector<std::pair<Edge, int>> rows;
  while (lines.next(line)) {
    const auto f = text::split_ws(line);
    if (f.size() != 3) throw Error(ErrorCode::Parse, "dataset: edge line must be `i j wins` at line " + std::to_string(lines.line_number()));
    const int i = text::parse<int>(f[0], "i") - 1;
    const int j = text::parse<int>(f[1], "j") - 1;
    int w = text::parse<int>(f[2], "wins");
    if (i > j) w = games - w;  // stored from the lower index's point of view
    rows.push_back({i < j ? Edge{i, j} : Edge{j, i}, w});
  }
  std::sort(rows.begin(), rows.end());
  std::vector<int> wins;
  for (const auto& [e, w] : rows) {
    edges.push_back(e);
    wins.push_back(w);
  }
  if (n < 1) throw Error(ErrorCode::Parse, "dataset: n must be positive");
  return ComparisonDataset(ComparisonGraph(n, std::move(edges), p), games, std::move(wins), origin);
}

}  // namespace btl
