#include "olr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "olr/rng.hpp"

namespace olr {

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Complete: return "complete";
    case GraphFamily::Path: return "path";
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::RandomGeometric: return "random_geometric";
    case GraphFamily::RandomRegular: return "random_regular";
    case GraphFamily::Custom: return "custom";
  }
  throw std::logic_error("unknown graph family");
}

GraphFamily family_from_name(const std::string& name) {
  if (name == "complete") return GraphFamily::Complete;
  if (name == "path") return GraphFamily::Path;
  if (name == "cycle") return GraphFamily::Cycle;
  if (name == "random_geometric") return GraphFamily::RandomGeometric;
  if (name == "random_regular") return GraphFamily::RandomRegular;
  if (name == "custom") return GraphFamily::Custom;
  throw std::invalid_argument("unknown graph family: " + name);
}

namespace {

bool strongly_connected(int n, const std::vector<std::vector<int>>& out) {
  // BFS along out-edges from every node; fine at the sizes we run.
  std::vector<char> seen(n);
  std::vector<int> queue;
  for (int start = 0; start < n; ++start) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, start);
    seen[start] = 1;
    int reached = 1;
    while (!queue.empty()) {
      int u = queue.back();
      queue.pop_back();
      for (int v : out[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          queue.push_back(v);
        }
      }
    }
    if (reached != n) return false;
  }
  return true;
}

}  // namespace

Graph::Graph(int n, std::vector<std::pair<int, int>> edges, GraphFamily family)
    : n_(n), edges_(std::move(edges)), family_(family) {
  if (n_ < 1) throw std::invalid_argument("graph needs at least one node");
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");
  std::vector<std::vector<int>> out(n_);
  in_.assign(n_, {});
  for (const auto& [j, i] : edges_) {
    if (j < 0 || j >= n_ || i < 0 || i >= n_)
      throw std::invalid_argument("edge index out of range");
    if (j == i) throw std::invalid_argument("self-loop edges are not stored");
    out[j].push_back(i);
    in_[i].push_back(j);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
  if (!strongly_connected(n_, out))
    throw std::invalid_argument("graph is not strongly connected");
}

int Graph::max_degree() const {
  int d = 0;
  for (int i = 0; i < n_; ++i) d = std::max(d, degree(i));
  return d;
}

bool Graph::is_symmetric() const {
  for (const auto& [j, i] : edges_) {
    if (!std::binary_search(edges_.begin(), edges_.end(), std::pair{i, j}))
      return false;
  }
  return true;
}

std::string Graph::to_json() const {
  nlohmann::json doc;
  doc["n"] = n_;
  doc["family"] = family_name(family_);
  auto& arr = doc["edges"] = nlohmann::json::array();
  for (const auto& [j, i] : edges_) arr.push_back({j, i});
  return doc.dump();
}

Graph Graph::from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : doc.at("edges"))
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Graph(doc.at("n").get<int>(), std::move(edges),
               family_from_name(doc.at("family").get<std::string>()));
}

Graph build_complete(int n) {
  if (n < 1) throw std::invalid_argument("build_complete: n >= 1 required");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j) edges.emplace_back(j, i);
  return Graph(n, std::move(edges), GraphFamily::Complete);
}

Graph build_path(int n) {
  if (n < 2) throw std::invalid_argument("build_path: n >= 2 required");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) {
    edges.emplace_back(i, i + 1);
    edges.emplace_back(i + 1, i);
  }
  return Graph(n, std::move(edges), GraphFamily::Path);
}

Graph build_cycle(int n) {
  if (n < 2) throw std::invalid_argument("build_cycle: n >= 2 required");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    edges.emplace_back(i, j);
    edges.emplace_back(j, i);
  }
  // n = 2 would duplicate (0,1)/(1,0); constructor dedup is not allowed, so
  // trim here.
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph(n, std::move(edges), GraphFamily::Cycle);
}

std::vector<std::array<double, 2>> geometric_positions(int n,
                                                       std::uint64_t seed,
                                                       int attempt) {
  std::mt19937_64 rng(derive_seed(seed, 0x9e0u, static_cast<std::uint64_t>(attempt)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 2>> pos(n);
  for (auto& p : pos) {
    p[0] = unit(rng);
    p[1] = unit(rng);
  }
  return pos;
}

Graph build_random_geometric(int n, double radius, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_random_geometric: n >= 1");
  if (!(radius > 0.0))
    throw std::invalid_argument("build_random_geometric: radius > 0 required");
  // radius >= sqrt(2) covers the whole unit square and gives the complete graph
  const double r2 = radius * radius;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto pos = geometric_positions(n, seed, attempt);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        double dx = pos[a][0] - pos[b][0];
        double dy = pos[a][1] - pos[b][1];
        if (dx * dx + dy * dy <= r2) {
          edges.emplace_back(a, b);
          edges.emplace_back(b, a);
        }
      }
    }
    try {
      return Graph(n, std::move(edges), GraphFamily::RandomGeometric);
    } catch (const std::invalid_argument&) {
      // disconnected sample; redraw positions
    }
  }
  throw std::runtime_error(
      "build_random_geometric: no connected sample within 1000 attempts");
}

Graph build_random_regular(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw std::invalid_argument("build_random_regular: n, k >= 1");
  if (k >= n) throw std::invalid_argument("build_random_regular: k < n required");
  if ((static_cast<long long>(n) * k) % 2 != 0)
    throw std::invalid_argument("build_random_regular: n*k must be even");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, 0x4e6u, static_cast<std::uint64_t>(attempt)));
    // Pairing model: k stubs per node, matched by a uniform shuffle.
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * k);
    for (int v = 0; v < n; ++v)
      for (int s = 0; s < k; ++s) stubs.push_back(v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<int, int>> undirected;
    bool simple = true;
    for (std::size_t p = 0; p + 1 < stubs.size(); p += 2) {
      int a = stubs[p], b = stubs[p + 1];
      if (a == b) { simple = false; break; }
      auto e = std::minmax(a, b);
      if (!undirected.insert({e.first, e.second}).second) { simple = false; break; }
    }
    if (!simple) continue;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(undirected.size() * 2);
    for (const auto& [a, b] : undirected) {
      edges.emplace_back(a, b);
      edges.emplace_back(b, a);
    }
    try {
      return Graph(n, std::move(edges), GraphFamily::RandomRegular);
    } catch (const std::invalid_argument&) {
      // disconnected pairing; retry
    }
  }
  throw std::runtime_error(
      "build_random_regular: no simple connected pairing within 1000 attempts");
}

}  // namespace olr
