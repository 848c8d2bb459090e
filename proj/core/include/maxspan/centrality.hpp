#pragma once

#include <iosfwd>
#include <vector>

#include "maxspan/graph.hpp"

namespace maxspan {

enum class CentralityMeasure { InDegree, OutDegree, Betweenness, Closeness, Eigenvector };

inline constexpr CentralityMeasure kAllCentralityMeasures[] = {
    CentralityMeasure::InDegree, CentralityMeasure::OutDegree,
    CentralityMeasure::Betweenness, CentralityMeasure::Closeness,
    CentralityMeasure::Eigenvector};

struct CentralityVector {
  CentralityMeasure measure;
  std::vector<double> scores;  // one nonnegative finite score per node
};

enum class DegreeDirection { In, Out };

CentralityVector degree_centrality(const DirectedGraph& g, DegreeDirection direction);

// Directed unweighted betweenness (Brandes accumulation), endpoints
// excluded, unnormalized raw path counts.
CentralityVector betweenness_centrality(const DirectedGraph& g);

// score[i] = (n-1) / sum of outward BFS distances. Throws
// NotStronglyConnected when any target is unreachable.
CentralityVector closeness_centrality(const DirectedGraph& g);

// Left dominant eigenvector of the adjacency matrix (v^T M = lambda v^T),
// power iteration on M + I from the uniform start vector, L2-normalized.
CentralityVector eigenvector_centrality(const DirectedGraph& g, double tol = 1e-10,
                                        int max_iters = 10000);

CentralityVector compute_centrality(const DirectedGraph& g, CentralityMeasure measure);

// The k nodes with largest scores, ties broken by lower id; returned ascending.
std::vector<int> top_k_nodes(const CentralityVector& c, int k);

// Mean over all unordered pairs of 1 - |symmetric difference| / (|S1|+|S2|).
// All sets must share the same cardinality >= 1; sets are sorted id lists.
double similarity_score(const std::vector<std::vector<int>>& sets);

// For each fraction f, the similarity score of the five measures'
// top-round(f*n) node sets.
std::vector<std::pair<double, double>> similarity_curve(const DirectedGraph& g,
                                                        const std::vector<double>& fractions);

// `node,score` rows, scores with 17 significant digits.
void write_centrality_csv(const CentralityVector& c, std::ostream& out);

const char* centrality_measure_name(CentralityMeasure m);

}  // namespace maxspan
