#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace olr {

enum class GraphFamily {
  Complete,
  Path,
  Cycle,
  RandomGeometric,
  RandomRegular,
  Custom,
};

std::string family_name(GraphFamily f);
GraphFamily family_from_name(const std::string& name);

// Directed communication topology over nodes 0..n-1. An edge (j, i) means
// node j sends to node i. Self-loops are never stored; self-weights live
// in the mixing matrix. Construction verifies strong connectivity.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges, GraphFamily family);

  int node_count() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  GraphFamily family() const { return family_; }

  // In-neighborhood N_i = {j : (j, i) in E}, sorted ascending.
  const std::vector<int>& in_neighbors(int i) const { return in_.at(i); }
  int degree(int i) const { return static_cast<int>(in_.at(i).size()); }
  int max_degree() const;
  bool is_symmetric() const;

  std::string to_json() const;
  static Graph from_json(const std::string& doc);

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;  // sorted, deduplicated
  std::vector<std::vector<int>> in_;
  GraphFamily family_;
};

Graph build_complete(int n);
Graph build_path(int n);
Graph build_cycle(int n);

// Nodes placed uniformly in the unit square; symmetric edges between pairs
// within Euclidean distance radius. Resamples positions (new sub-seed) until
// the graph is connected, up to 1000 attempts.
Graph build_random_geometric(int n, double radius, std::uint64_t seed);

// Uniform random k-regular simple graph via the pairing model, retried until
// simple and connected, up to 1000 attempts. Requires n*k even and k < n.
Graph build_random_regular(int n, int k, std::uint64_t seed);

// Positions drawn for (seed, attempt); exposed so tests can enumerate
// pairwise distances independently of the builder.
std::vector<std::array<double, 2>> geometric_positions(int n,
                                                       std::uint64_t seed,
                                                       int attempt);

}  // namespace olr
