#include "maxspan/placement.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "maxspan/rng.hpp"

namespace maxspan {

InfluenceRegion bfs_cluster(const DirectedGraph& g, int root, int s_cluster,
                            ClusterDirection direction) {
  const int n = g.node_count();
  if (root < 0 || root >= n) throw InvalidSpec("bfs_cluster: root out of range");
  if (s_cluster < 1) throw InvalidCount("bfs_cluster: s_cluster must be >= 1");
  InfluenceRegion region{root, {root}};
  if (s_cluster == 1) return region;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  seen[static_cast<std::size_t>(root)] = 1;
  std::deque<int> queue{root};
  std::vector<int> merged;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    auto visit = [&](int v) {
      if (seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = 1;
      region.members.push_back(v);
      queue.push_back(v);
      return static_cast<int>(region.members.size()) == s_cluster;
    };
    if (direction == ClusterDirection::Undirected) {
      // Merge both sorted neighbor lists so ids are still visited ascending.
      merged.clear();
      const auto out = g.out_neighbors(u);
      const auto in = g.in_neighbors(u);
      std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(merged));
      for (const int v : merged)
        if (visit(v)) return region;
    } else {
      const auto neigh =
          direction == ClusterDirection::Out ? g.out_neighbors(u) : g.in_neighbors(u);
      for (const int v : neigh)
        if (visit(v)) return region;
    }
  }
  return region;  // reachable set exhausted before s_cluster
}

std::vector<int> maxspan_place_from(const DirectedGraph& g, int n_advs, int n_clients,
                                    int first, ClusterDirection direction) {
  const int n = g.node_count();
  if (n_advs < 1 || n_advs > n) throw InvalidCount("maxspan_place: n_advs must be in [1, n]");
  if (n_clients != n) throw InvalidCount("maxspan_place: n_clients must equal node count");
  if (first < 0 || first >= n) throw InvalidSpec("maxspan_place: first pick out of range");
  const int s_cluster = std::max(1, n_clients / n_advs);
  std::vector<InfluenceRegion> clusters;
  clusters.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) clusters.push_back(bfs_cluster(g, v, s_cluster, direction));

  std::vector<int> adversaries{first};
  std::vector<char> is_adv(static_cast<std::size_t>(n), 0);
  is_adv[static_cast<std::size_t>(first)] = 1;
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  for (const int m : clusters[static_cast<std::size_t>(first)].members)
    covered[static_cast<std::size_t>(m)] = 1;

  while (static_cast<int>(adversaries.size()) < n_advs) {
    int best = -1;
    int best_overlap = n + 1;
    for (int cand = 0; cand < n; ++cand) {
      if (is_adv[static_cast<std::size_t>(cand)]) continue;
      int overlap = 0;
      for (const int m : clusters[static_cast<std::size_t>(cand)].members)
        overlap += covered[static_cast<std::size_t>(m)];
      if (overlap < best_overlap) {  // strict: ties keep the lowest id
        best_overlap = overlap;
        best = cand;
      }
    }
    adversaries.push_back(best);
    is_adv[static_cast<std::size_t>(best)] = 1;
    for (const int m : clusters[static_cast<std::size_t>(best)].members)
      covered[static_cast<std::size_t>(m)] = 1;
  }
  std::sort(adversaries.begin(), adversaries.end());
  return adversaries;
}

std::vector<int> maxspan_place(const DirectedGraph& g, int n_advs, int n_clients,
                               std::uint64_t seed, ClusterDirection direction) {
  Rng stream = Rng(seed).substream("maxspan_first");
  const int first =
      static_cast<int>(stream.next_below(static_cast<std::uint64_t>(g.node_count())));
  return maxspan_place_from(g, n_advs, n_clients, first, direction);
}

std::vector<int> place(const PlacementStrategy& strategy, const DirectedGraph& g,
                       std::uint64_t seed) {
  const int n = g.node_count();
  if (strategy.n_advs < 1 || strategy.n_advs >= n)
    throw InvalidCount("place: n_advs must be in [1, n)");
  switch (strategy.kind) {
    case PlacementKind::Random: {
      Rng stream = Rng(seed).substream("random_place");
      std::vector<int> picks = stream.sample_without_replacement(n, strategy.n_advs);
      std::sort(picks.begin(), picks.end());
      return picks;
    }
    case PlacementKind::CentralityBased:
      return top_k_nodes(compute_centrality(g, strategy.measure), strategy.n_advs);
    case PlacementKind::MaxSpAN:
      return maxspan_place(g, strategy.n_advs, n, seed);
  }
  throw Error("unknown placement strategy");
}

double avg_adversarial_distance(const DirectedGraph& g, const std::vector<int>& adversaries) {
  if (adversaries.size() < 2)
    throw TooFewAdversaries("avg_adversarial_distance needs |A| >= 2");
  double total = 0.0;
  int pairs = 0;
  std::vector<std::vector<int>> dists;
  dists.reserve(adversaries.size());
  for (const int a : adversaries) dists.push_back(hop_distances(g, a));
  for (std::size_t i = 0; i < adversaries.size(); ++i)
    for (std::size_t j = i + 1; j < adversaries.size(); ++j) {
      const int fwd = dists[i][static_cast<std::size_t>(adversaries[j])];
      const int bwd = dists[j][static_cast<std::size_t>(adversaries[i])];
      if (fwd == kUnreachableHops || bwd == kUnreachableHops)
        throw NotStronglyConnected("avg_adversarial_distance requires mutual reachability");
      total += 0.5 * static_cast<double>(fwd + bwd);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

const char* placement_strategy_name(const PlacementStrategy& strategy) {
  switch (strategy.kind) {
    case PlacementKind::Random: return "random";
    case PlacementKind::MaxSpAN: return "maxspan";
    case PlacementKind::CentralityBased: return centrality_measure_name(strategy.measure);
  }
  return "unknown";
}

void write_placement_csv(const PlacementStrategy& strategy, std::uint64_t seed,
                         const std::vector<int>& adversaries, std::ostream& out) {
  out << "strategy,seed,adversaries\n";
  out << placement_strategy_name(strategy) << "," << seed << ",";
  for (std::size_t i = 0; i < adversaries.size(); ++i) {
    if (i > 0) out << ";";
    out << adversaries[i];
  }
  out << "\n";
}

}  // namespace maxspan
