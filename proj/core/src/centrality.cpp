#include "maxspan/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <ostream>

namespace maxspan {

CentralityVector degree_centrality(const DirectedGraph& g, DegreeDirection direction) {
  const int n = g.node_count();
  CentralityVector c{direction == DegreeDirection::In ? CentralityMeasure::InDegree
                                                      : CentralityMeasure::OutDegree,
                     std::vector<double>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i)
    c.scores[static_cast<std::size_t>(i)] = static_cast<double>(
        direction == DegreeDirection::In ? g.in_degree(i) : g.out_degree(i));
  return c;
}

CentralityVector betweenness_centrality(const DirectedGraph& g) {
  const int n = g.node_count();
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<double> sigma(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(n));
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();
    dist[static_cast<std::size_t>(s)] = 0;
    sigma[static_cast<std::size_t>(s)] = 1.0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (const int v : g.out_neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
        if (dist[static_cast<std::size_t>(v)] == dist[static_cast<std::size_t>(u)] + 1) {
          sigma[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(u)];
          preds[static_cast<std::size_t>(v)].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (const int u : preds[static_cast<std::size_t>(w)])
        delta[static_cast<std::size_t>(u)] +=
            sigma[static_cast<std::size_t>(u)] / sigma[static_cast<std::size_t>(w)] *
            (1.0 + delta[static_cast<std::size_t>(w)]);
      if (w != s) score[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
    }
  }
  return {CentralityMeasure::Betweenness, std::move(score)};
}

CentralityVector closeness_centrality(const DirectedGraph& g) {
  const int n = g.node_count();
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> dist = hop_distances(g, i);
    long long total = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (dist[static_cast<std::size_t>(j)] == kUnreachableHops)
        throw NotStronglyConnected("closeness centrality requires strong connectivity");
      total += dist[static_cast<std::size_t>(j)];
    }
    score[static_cast<std::size_t>(i)] =
        n == 1 ? 0.0 : static_cast<double>(n - 1) / static_cast<double>(total);
  }
  return {CentralityMeasure::Closeness, std::move(score)};
}

CentralityVector eigenvector_centrality(const DirectedGraph& g, double tol, int max_iters) {
  if (!is_strongly_connected(g))
    throw NotStronglyConnected("eigenvector centrality requires strong connectivity");
  const int n = g.node_count();
  const double uniform = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> v(static_cast<std::size_t>(n), uniform);
  std::vector<double> next(static_cast<std::size_t>(n));
  for (int iter = 0; iter < max_iters; ++iter) {
    // One step of v <- v^T (M + I); the identity shift breaks period-2
    // oscillation on bipartite-like structure without moving eigenvectors.
    for (int j = 0; j < n; ++j) {
      double acc = v[static_cast<std::size_t>(j)];
      for (const int i : g.in_neighbors(j)) acc += v[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(j)] = acc;
    }
    double norm = 0.0;
    for (const double x : next) norm += x * x;
    norm = std::sqrt(norm);
    double change = 0.0;
    for (int j = 0; j < n; ++j) {
      next[static_cast<std::size_t>(j)] /= norm;
      const double d = next[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>(j)];
      change += d * d;
    }
    v.swap(next);
    if (std::sqrt(change) < tol) return {CentralityMeasure::Eigenvector, std::move(v)};
  }
  throw NoConvergence("power iteration did not converge in " + std::to_string(max_iters) +
                      " iterations");
}

CentralityVector compute_centrality(const DirectedGraph& g, CentralityMeasure measure) {
  switch (measure) {
    case CentralityMeasure::InDegree:
      return degree_centrality(g, DegreeDirection::In);
    case CentralityMeasure::OutDegree:
      return degree_centrality(g, DegreeDirection::Out);
    case CentralityMeasure::Betweenness:
      return betweenness_centrality(g);
    case CentralityMeasure::Closeness:
      return closeness_centrality(g);
    case CentralityMeasure::Eigenvector:
      return eigenvector_centrality(g);
  }
  throw Error("unknown centrality measure");
}

std::vector<int> top_k_nodes(const CentralityVector& c, int k) {
  const int n = static_cast<int>(c.scores.size());
  if (k < 1 || k > n) throw InvalidCount("top_k_nodes: k must be in [1, n]");
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&c](int a, int b) {
    const double sa = c.scores[static_cast<std::size_t>(a)];
    const double sb = c.scores[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  ids.resize(static_cast<std::size_t>(k));
  std::sort(ids.begin(), ids.end());
  return ids;
}

double similarity_score(const std::vector<std::vector<int>>& sets) {
  if (sets.size() < 2) throw CardinalityMismatch("similarity_score needs at least 2 sets");
  const std::size_t card = sets.front().size();
  if (card < 1) throw CardinalityMismatch("similarity_score needs nonempty sets");
  for (const auto& s : sets)
    if (s.size() != card) throw CardinalityMismatch("similarity_score: unequal set sizes");
  double total = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      std::vector<int> inter;
      std::set_intersection(sets[a].begin(), sets[a].end(), sets[b].begin(), sets[b].end(),
                            std::back_inserter(inter));
      const double sym_diff = static_cast<double>(2 * (card - inter.size()));
      total += 1.0 - sym_diff / static_cast<double>(2 * card);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

std::vector<std::pair<double, double>> similarity_curve(const DirectedGraph& g,
                                                        const std::vector<double>& fractions) {
  const int n = g.node_count();
  std::vector<CentralityVector> measures;
  measures.reserve(5);
  for (const CentralityMeasure m : kAllCentralityMeasures)
    measures.push_back(compute_centrality(g, m));
  std::vector<std::pair<double, double>> curve;
  curve.reserve(fractions.size());
  for (const double f : fractions) {
    if (f <= 0.0 || f > 1.0) throw InvalidSpec("similarity_curve: fraction must be in (0, 1]");
    const int k = std::max(1, static_cast<int>(std::llround(f * n)));
    std::vector<std::vector<int>> sets;
    sets.reserve(5);
    for (const auto& c : measures) sets.push_back(top_k_nodes(c, k));
    curve.emplace_back(f, similarity_score(sets));
  }
  return curve;
}

void write_centrality_csv(const CentralityVector& c, std::ostream& out) {
  out << "node,score\n";
  char buf[64];
  for (std::size_t i = 0; i < c.scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", c.scores[i]);
    out << i << "," << buf << "\n";
  }
}

const char* centrality_measure_name(CentralityMeasure m) {
  switch (m) {
    case CentralityMeasure::InDegree: return "in_degree";
    case CentralityMeasure::OutDegree: return "out_degree";
    case CentralityMeasure::Betweenness: return "betweenness";
    case CentralityMeasure::Closeness: return "closeness";
    case CentralityMeasure::Eigenvector: return "eigenvector";
  }
  return "unknown";
}

}  // namespace maxspan
