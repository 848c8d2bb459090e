#include "maxspan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "maxspan/rng.hpp"

namespace maxspan {

void GraphSpec::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidSpec("graph spec: " + msg); };
  if (family != GraphFamily::EdgeList && n < 1) fail("n must be >= 1");
  const bool has_p = p_edge >= 0.0;
  const bool has_m = m_attach >= 0;
  const bool has_r = radius >= 0.0;
  const bool has_k = k >= 0;
  const bool has_path = !path.empty();
  switch (family) {
    case GraphFamily::ER:
      if (!has_p || p_edge > 1.0) fail("ER requires p_edge in [0, 1]");
      if (has_m || has_r || has_k || has_path) fail("ER takes only n, p_edge, seed");
      break;
    case GraphFamily::PreferentialAttachment:
      if (!has_m || m_attach < 1 || m_attach >= n) fail("PA requires 1 <= m_attach < n");
      if (has_p || has_r || has_k || has_path) fail("PA takes only n, m_attach, seed");
      break;
    case GraphFamily::DirectedGeometric:
      if (!has_r || radius <= 0.0 || radius > std::sqrt(2.0))
        fail("DG requires 0 < radius <= sqrt(2)");
      if (has_p || has_m || has_k || has_path) fail("DG takes only n, radius, seed");
      break;
    case GraphFamily::KOut:
      if (!has_k || k < 1 || k >= n) fail("KOut requires 1 <= k < n");
      if (has_p || has_m || has_r || has_path) fail("KOut takes only n, k, seed");
      break;
    case GraphFamily::EdgeList:
      if (!has_path) fail("EdgeList requires path");
      if (has_p || has_m || has_r || has_k) fail("EdgeList takes only path");
      break;
  }
}

DirectedGraph DirectedGraph::from_edges(int n, std::vector<std::pair<int, int>> edges) {
  if (n < 1) throw InvalidSpec("graph must have at least one node");
  DirectedGraph g;
  g.n_ = n;
  g.out_.resize(static_cast<std::size_t>(n));
  g.in_.resize(static_cast<std::size_t>(n));
  std::sort(edges.begin(), edges.end());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw InvalidSpec("edge endpoint out of range");
    if (u == v) throw InvalidSpec("self-loops are not stored");
    if (e > 0 && edges[e] == edges[e - 1]) throw InvalidSpec("duplicate edge");
    g.out_[static_cast<std::size_t>(u)].push_back(v);
    g.in_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& lst : g.in_) std::sort(lst.begin(), lst.end());
  g.n_edges_ = edges.size();
  return g;
}

bool DirectedGraph::has_edge(int i, int j) const {
  const auto& lst = out_[static_cast<std::size_t>(i)];
  return std::binary_search(lst.begin(), lst.end(), j);
}

std::vector<std::pair<int, int>> DirectedGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(n_edges_);
  for (int u = 0; u < n_; ++u)
    for (const int v : out_[static_cast<std::size_t>(u)]) out.emplace_back(u, v);
  return out;
}

namespace {

DirectedGraph generate_er(int n, double p, Rng rng) {
  Rng stream = rng.substream("er_edges");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (stream.next_double() < p) edges.emplace_back(i, j);
    }
  return DirectedGraph::from_edges(n, std::move(edges));
}

std::pair<DirectedGraph, std::vector<Point2D>> generate_dg(int n, double radius, Rng rng) {
  Rng stream = rng.substream("dg_points");
  std::vector<Point2D> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = stream.next_double();
    p.y = stream.next_double();
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = pts[static_cast<std::size_t>(i)].x - pts[static_cast<std::size_t>(j)].x;
      const double dy = pts[static_cast<std::size_t>(i)].y - pts[static_cast<std::size_t>(j)].y;
      if (std::sqrt(dx * dx + dy * dy) <= radius) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
      }
    }
  return {DirectedGraph::from_edges(n, std::move(edges)), std::move(pts)};
}

DirectedGraph generate_kout(int n, int k, Rng rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    Rng stream = rng.substream("kout_targets", static_cast<std::uint64_t>(i));
    // Targets drawn from V \ {i} without replacement.
    std::vector<int> picks = stream.sample_without_replacement(n - 1, k);
    for (const int t : picks) {
      const int target = t >= i ? t + 1 : t;
      edges.emplace_back(i, target);
    }
  }
  return DirectedGraph::from_edges(n, std::move(edges));
}

// Directed preferential attachment: reciprocal seed clique of m+1 nodes,
// then each new node attaches reciprocally to m existing targets chosen
// with probability proportional to total degree + 1.
DirectedGraph generate_pa(int n, int m, Rng rng) {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  const int seed_size = std::min(m + 1, n);
  for (int i = 0; i < seed_size; ++i)
    for (int j = 0; j < seed_size; ++j) {
      if (i == j) continue;
      edges.emplace_back(i, j);
      degree[static_cast<std::size_t>(i)] += 1;
      degree[static_cast<std::size_t>(j)] += 1;
    }
  for (int v = seed_size; v < n; ++v) {
    Rng stream = rng.substream("pa_targets", static_cast<std::uint64_t>(v));
    std::vector<char> chosen(static_cast<std::size_t>(v), 0);
    for (int pick = 0; pick < m; ++pick) {
      double total = 0.0;
      for (int t = 0; t < v; ++t)
        if (!chosen[static_cast<std::size_t>(t)])
          total += static_cast<double>(degree[static_cast<std::size_t>(t)] + 1);
      double point = stream.next_double() * total;
      int target = -1;
      for (int t = 0; t < v; ++t) {
        if (chosen[static_cast<std::size_t>(t)]) continue;
        point -= static_cast<double>(degree[static_cast<std::size_t>(t)] + 1);
        if (point < 0.0) {
          target = t;
          break;
        }
      }
      if (target < 0) {  // fp edge case: fall back to last unchosen node
        for (int t = v - 1; t >= 0; --t)
          if (!chosen[static_cast<std::size_t>(t)]) {
            target = t;
            break;
          }
      }
      chosen[static_cast<std::size_t>(target)] = 1;
      edges.emplace_back(v, target);
      edges.emplace_back(target, v);
      degree[static_cast<std::size_t>(v)] += 2;
      degree[static_cast<std::size_t>(target)] += 2;
    }
  }
  return DirectedGraph::from_edges(n, std::move(edges));
}

}  // namespace

GenerateResult generate(const GraphSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  GenerateResult result;
  result.seed_used = spec.seed;
  switch (spec.family) {
    case GraphFamily::ER:
      result.graph = generate_er(spec.n, spec.p_edge, rng);
      break;
    case GraphFamily::DirectedGeometric: {
      auto [g, pts] = generate_dg(spec.n, spec.radius, rng);
      result.graph = std::move(g);
      result.points = std::move(pts);
      break;
    }
    case GraphFamily::KOut:
      result.graph = generate_kout(spec.n, spec.k, rng);
      break;
    case GraphFamily::PreferentialAttachment:
      result.graph = generate_pa(spec.n, spec.m_attach, rng);
      break;
    case GraphFamily::EdgeList:
      result.graph = load_edge_list(spec.path).graph;
      break;
  }
  return result;
}

GenerateResult generate_strongly_connected(const GraphSpec& spec, int max_attempts) {
  if (spec.family == GraphFamily::EdgeList)
    throw InvalidSpec("generate_strongly_connected does not apply to edge-list graphs");
  GraphSpec attempt = spec;
  for (int i = 0; i < max_attempts; ++i) {
    attempt.seed = spec.seed + static_cast<std::uint64_t>(i);
    GenerateResult r = generate(attempt);
    if (is_strongly_connected(r.graph)) return r;
  }
  throw ConnectivityFailure("no strongly connected graph after " +
                            std::to_string(max_attempts) + " attempts");
}

EdgeListLoad load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list: " + path);
  EdgeListLoad result;
  std::unordered_map<long long, int> remap;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::pair<int, int>> seen_sorted;
  std::string line;
  int line_no = 0;
  auto dense_id = [&](long long raw) {
    auto it = remap.find(raw);
    if (it != remap.end()) return it->second;
    const int id = static_cast<int>(remap.size());
    remap.emplace(raw, id);
    result.original_ids.push_back(raw);
    return id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    long long raw_src = 0;
    long long raw_dst = 0;
    if (!(ls >> raw_src >> raw_dst)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected `src dst`");
    }
    std::string trailing;
    if (ls >> trailing)
      throw ParseError(path + ":" + std::to_string(line_no) + ": trailing token `" +
                       trailing + "`");
    const int src = dense_id(raw_src);
    const int dst = dense_id(raw_dst);
    if (src == dst) {
      result.dropped_self_loops += 1;
      continue;
    }
    edges.emplace_back(src, dst);
  }
  if (edges.empty()) throw EmptyGraph("edge list has no usable edges: " + path);
  // Files whose ids are already the dense range 0..n-1 keep them verbatim,
  // so write -> load round-trips; anything else gets first-appearance ids.
  const int n = static_cast<int>(remap.size());
  bool already_dense = true;
  for (const auto& [raw, id] : remap)
    if (raw < 0 || raw >= n) {
      already_dense = false;
      break;
    }
  if (already_dense) {
    for (auto& [src, dst] : edges) {
      src = static_cast<int>(result.original_ids[static_cast<std::size_t>(src)]);
      dst = static_cast<int>(result.original_ids[static_cast<std::size_t>(dst)]);
    }
    for (int i = 0; i < n; ++i) result.original_ids[static_cast<std::size_t>(i)] = i;
  }
  std::sort(edges.begin(), edges.end());
  std::vector<std::pair<int, int>> unique_edges;
  unique_edges.reserve(edges.size());
  for (const auto& e : edges) {
    if (!unique_edges.empty() && unique_edges.back() == e) {
      result.dropped_duplicates += 1;
      continue;
    }
    unique_edges.push_back(e);
  }
  result.graph = DirectedGraph::from_edges(n, std::move(unique_edges));
  return result;
}

void write_edge_list(const DirectedGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw Error("cannot write edge list: " + path);
  for (const auto& [u, v] : g.edges()) out << u << " " << v << "\n";
}

bool is_strongly_connected(const DirectedGraph& g) {
  const int n = g.node_count();
  if (n == 1) return true;
  auto reaches_all = [n](auto neighbors) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int count = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const int v : neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          queue.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all([&g](int u) { return g.out_neighbors(u); }) &&
         reaches_all([&g](int u) { return g.in_neighbors(u); });
}

std::vector<int> hop_distances(const DirectedGraph& g, int source) {
  const int n = g.node_count();
  if (source < 0 || source >= n) throw InvalidSpec("hop_distances: source out of range");
  std::vector<int> dist(static_cast<std::size_t>(n), kUnreachableHops);
  dist[static_cast<std::size_t>(source)] = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const int v : g.out_neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] == kUnreachableHops) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace maxspan
