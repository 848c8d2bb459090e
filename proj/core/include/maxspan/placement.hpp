#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "maxspan/centrality.hpp"
#include "maxspan/graph.hpp"

namespace maxspan {

enum class PlacementKind { Random, CentralityBased, MaxSpAN };

struct PlacementStrategy {
  PlacementKind kind = PlacementKind::Random;
  CentralityMeasure measure = CentralityMeasure::Eigenvector;  // CentralityBased only
  int n_advs = 1;
};

// BFS frontier direction when growing influence regions.
enum class ClusterDirection { Out, In, Undirected };

// BFS cluster grown from `root` (the paper's C_G[g]); members in visit order.
struct InfluenceRegion {
  int root = 0;
  std::vector<int> members;
};

// BFS with neighbors visited ascending by id, truncated at exactly
// s_cluster members (or the whole reachable set, whichever is smaller).
InfluenceRegion bfs_cluster(const DirectedGraph& g, int root, int s_cluster,
                            ClusterDirection direction = ClusterDirection::Out);

// Adversary selection. Returns n_advs distinct node ids, ascending.
std::vector<int> place(const PlacementStrategy& strategy, const DirectedGraph& g,
                       std::uint64_t seed);

// MaxSpAN selection with a uniformly random first adversary.
std::vector<int> maxspan_place(const DirectedGraph& g, int n_advs, int n_clients,
                               std::uint64_t seed,
                               ClusterDirection direction = ClusterDirection::Out);

// Deterministic variant with the first adversary pinned (used by the
// random-first version and by spread tests).
std::vector<int> maxspan_place_from(const DirectedGraph& g, int n_advs, int n_clients,
                                    int first,
                                    ClusterDirection direction = ClusterDirection::Out);

// Mean over unordered adversary pairs of (hop(i->j) + hop(j->i)) / 2.
double avg_adversarial_distance(const DirectedGraph& g, const std::vector<int>& adversaries);

// `strategy,seed,adversaries` with a `;`-joined ascending id list.
void write_placement_csv(const PlacementStrategy& strategy, std::uint64_t seed,
                         const std::vector<int>& adversaries, std::ostream& out);

const char* placement_strategy_name(const PlacementStrategy& strategy);

}  // namespace maxspan
