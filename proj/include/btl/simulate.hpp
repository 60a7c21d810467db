#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "btl/model.hpp"
#include "btl/rng.hpp"

namespace btl {

struct Edge {
  int i = 0;  // always i < j
  int j = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph on players 0..n-1 with sorted edge list.
class ComparisonGraph {
 public:
  ComparisonGraph() = default;
  /// Normalizes each pair to i < j and sorts; throws on self-loops, duplicate
  /// pairs, or out-of-range endpoints. `p` is the generation probability when
  /// known (needed for the spectral normalizer d = 2np).
  ComparisonGraph(int n, std::vector<Edge> edges, std::optional<double> p);

  int n() const { return n_; }
  std::optional<double> p() const { return p_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  /// Index of edge {a, b} in edges(), if present.
  std::optional<std::size_t> find(int a, int b) const;
  std::vector<int> degrees() const;
  bool connected() const;

 private:
  int n_ = 0;
  std::optional<double> p_;
  std::vector<Edge> edges_;
};

/// Comparison outcomes: L games on every edge, stored as integer win counts of
/// the lower-index endpoint, so every ybar is an exact multiple of 1/L.
class ComparisonDataset {
 public:
  ComparisonDataset() = default;
  ComparisonDataset(ComparisonGraph graph, int games_per_edge, std::vector<int> wins,
                    RngSeed origin = {});

  const ComparisonGraph& graph() const { return graph_; }
  int n() const { return graph_.n(); }
  int games_per_edge() const { return games_; }
  const std::vector<int>& wins() const { return wins_; }
  /// Seed the data was sampled from; recorded in the file header.
  RngSeed origin() const { return origin_; }

  /// Win fraction of edges()[e].i over edges()[e].j.
  double ybar(std::size_t e) const { return static_cast<double>(wins_[e]) / games_; }
  /// Win fraction of a over b; equals 1 - ybar(b, a). Throws if {a, b} is not an edge.
  double ybar(int a, int b) const;

  /// FNV-1a digest of (n, L, edges, wins); identical data gives identical hashes.
  std::uint64_t hash() const;

  bool operator==(const ComparisonDataset& other) const;

 private:
  ComparisonGraph graph_;
  int games_ = 1;
  std::vector<int> wins_;
  RngSeed origin_;
};

/// Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs independently.
ComparisonGraph sample_graph(int n, double p, RngSeed rng);

/// L Bernoulli(psi(theta*_{r_i} - theta*_{r_j})) games on every edge.
ComparisonDataset sample_comparisons(const ComparisonGraph& graph, const SkillProfile& profile,
                                     const Ranking& truth, int games_per_edge, RngSeed rng);

// Experimental skill designs. All return sorted profiles that pass
// validate_profile with the (k, delta, kappa) they declare.

/// Four pieces of sizes k/2, k/2, (n-k)/2, (n-k)/2 at 10, 10-tau, 10-tau-delta, 0.
SkillProfile design_four_piece_tau(double tau, double delta, int n = 200, int k = 50);
/// Four pieces of sizes k(1-rho), k rho, (n-k)(1-rho), (n-k) rho at 10, 6, 6-delta, 0.
/// Piece sizes must come out integral.
SkillProfile design_four_piece_rho(double rho, double delta, int n = 200, int k = 50);
/// theta_1 = 10, theta_n = 0, top block Uniform[6,10], bottom block Uniform[0, 6-delta].
SkillProfile design_random_uniform(double delta, RngSeed rng, int n = 200, int k = 50);
/// k players at delta, the rest at 0; kappa = delta.
SkillProfile design_two_piece(double delta, int n = 200, int k = 50);

/// Uniformly random permutation of ranks (Fisher-Yates on CounterRng).
Ranking random_ranking(int n, RngSeed rng);

/// Line format: header `n p L seed stream`, then `i j wins` per edge with
/// 1-based indices. An unknown p is written as `-`. Lines starting with `#`
/// are comments.
void write_dataset(std::ostream& os, const ComparisonDataset& data);
ComparisonDataset read_dataset(std::istream& is);

}  // namespace btl
