#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxspan/errors.hpp"

namespace maxspan {

enum class GraphFamily { ER, PreferentialAttachment, DirectedGeometric, KOut, EdgeList };

struct GraphSpec {
  GraphFamily family = GraphFamily::ER;
  int n = 0;
  double p_edge = -1.0;  // ER
  int m_attach = -1;     // PreferentialAttachment
  double radius = -1.0;  // DirectedGeometric
  int k = -1;            // KOut
  std::string path;      // EdgeList
  std::uint64_t seed = 0;

  // Throws InvalidSpec when fields irrelevant to `family` are set or the
  // relevant ones are out of range.
  void validate() const;
};

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

// Immutable directed graph. Node ids are 0..n-1; out- and in-neighbor
// lists are sorted ascending; no self-loops or duplicate edges stored.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Throws InvalidSpec on out-of-range endpoints, self-loops or duplicates.
  static DirectedGraph from_edges(int n, std::vector<std::pair<int, int>> edges);

  int node_count() const { return n_; }
  std::size_t edge_count() const { return n_edges_; }
  std::span<const int> out_neighbors(int i) const { return out_[static_cast<std::size_t>(i)]; }
  std::span<const int> in_neighbors(int i) const { return in_[static_cast<std::size_t>(i)]; }
  int out_degree(int i) const { return static_cast<int>(out_[static_cast<std::size_t>(i)].size()); }
  int in_degree(int i) const { return static_cast<int>(in_[static_cast<std::size_t>(i)].size()); }
  bool has_edge(int i, int j) const;
  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_ = 0;
  std::size_t n_edges_ = 0;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

struct GenerateResult {
  DirectedGraph graph;
  std::vector<Point2D> points;  // DirectedGeometric only; empty otherwise
  std::uint64_t seed_used = 0;
};

// Draws a graph from the family named in `spec`. Deterministic: identical
// (spec, seed) yields a bit-identical edge set on every platform.
GenerateResult generate(const GraphSpec& spec);

// Retries generate() with seed, seed+1, ... until strong connectivity holds.
// Throws ConnectivityFailure after max_attempts draws.
GenerateResult generate_strongly_connected(const GraphSpec& spec, int max_attempts = 1000);

struct EdgeListLoad {
  DirectedGraph graph;
  int dropped_self_loops = 0;
  int dropped_duplicates = 0;
  std::vector<long long> original_ids;  // dense id -> id in the file
};

// Parses `src dst` lines ('#' comments allowed); ids already forming the
// dense range 0..n-1 are kept verbatim (so write/load round-trips), others
// are remapped to a dense range in first-appearance order.
EdgeListLoad load_edge_list(const std::string& path);
void write_edge_list(const DirectedGraph& g, const std::string& path);

bool is_strongly_connected(const DirectedGraph& g);

// Sentinel for unreachable nodes in hop_distances. Never do arithmetic on it.
inline constexpr int kUnreachableHops = -1;

// Shortest directed hop counts from `source` via BFS over out-edges.
std::vector<int> hop_distances(const DirectedGraph& g, int source);

}  // namespace maxspan
