// Independent reference implementations used only by tests. Everything here
// is written from the definitions (path enumeration, dense linear algebra),
// deliberately sharing no code with the library's algorithms.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "maxspan/graph.hpp"

namespace oracle {

// BFS distances + shortest-path counts from every source. Counts fit in
// 64 bits comfortably at the n <= 10 sizes tests use.
struct PathTable {
  std::vector<std::vector<int>> dist;              // [s][v], -1 unreachable
  std::vector<std::vector<std::uint64_t>> sigma;   // [s][v]
};

inline PathTable path_table(const maxspan::DirectedGraph& g) {
  const int n = g.node_count();
  PathTable t;
  t.dist.assign(n, std::vector<int>(n, -1));
  t.sigma.assign(n, std::vector<std::uint64_t>(n, 0));
  for (int s = 0; s < n; ++s) {
    auto& dist = t.dist[s];
    auto& sigma = t.sigma[s];
    dist[s] = 0;
    sigma[s] = 1;
    std::vector<int> frontier{s};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (const int u : frontier)
        for (const int v : g.out_neighbors(u)) {
          if (dist[v] == -1) {
            dist[v] = dist[u] + 1;
            next.push_back(v);
          }
          if (dist[v] == dist[u] + 1) sigma[v] += sigma[u];
        }
      frontier = std::move(next);
    }
  }
  return t;
}

// Betweenness from the definition: sum over (s,t) of the fraction of
// shortest s->t paths passing through v, endpoints excluded.
inline std::vector<double> betweenness(const maxspan::DirectedGraph& g) {
  const int n = g.node_count();
  const PathTable t = path_table(g);
  std::vector<double> score(n, 0.0);
  for (int s = 0; s < n; ++s)
    for (int u = 0; u < n; ++u) {
      if (u == s || t.sigma[s][u] == 0) continue;
      for (int v = 0; v < n; ++v) {
        if (v == s || v == u) continue;
        if (t.dist[s][v] == -1 || t.dist[v][u] == -1) continue;
        if (t.dist[s][v] + t.dist[v][u] != t.dist[s][u]) continue;
        score[v] += static_cast<double>(t.sigma[s][v]) *
                    static_cast<double>(t.sigma[v][u]) /
                    static_cast<double>(t.sigma[s][u]);
      }
    }
  return score;
}

// (n-1) / sum of outward distances; caller guarantees strong connectivity.
inline std::vector<double> closeness(const maxspan::DirectedGraph& g) {
  const int n = g.node_count();
  const PathTable t = path_table(g);
  std::vector<double> score(n, 0.0);
  for (int i = 0; i < n; ++i) {
    long long total = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) total += t.dist[i][j];
    score[i] = static_cast<double>(n - 1) / static_cast<double>(total);
  }
  return score;
}

// Left Perron vector of M via a dense eigen-solve of (M + I)^T; positive
// orientation, L2-normalized.
inline std::vector<double> eigenvector(const maxspan::DirectedGraph& g) {
  const int n = g.node_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (const int j : g.out_neighbors(i)) m(j, i) += 1.0;  // transpose of M
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (solver.eigenvalues()[i].real() > solver.eigenvalues()[best].real()) best = i;
  Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  if (v.sum() < 0.0) v = -v;
  v.normalize();
  return {v.data(), v.data() + n};
}

}  // namespace oracle
