#pragma once

// Correlation graph on sample indices: edge iff |<y_i, y_j>| > rho (strict).

#include <cstdint>
#include <utility>
#include <vector>

#include "overdict/types.hpp"

namespace overdict {

struct CorrelationGraph {
  int n = 0;
  double rho = 0.0;
  std::vector<std::vector<int>> neighbors;   // sorted ascending, no self loops
  std::vector<std::pair<int, int>> edges;    // i < j, lexicographic order

  bool has_edge(int i, int j) const;
  std::size_t edge_count() const { return edges.size(); }
};

// Default threshold m^2/2 - s^2 M^2 mu0_effective / sqrt(d): the midpoint
// estimate that separates pairs sharing an atom (inner product near a
// coefficient product, magnitude >= m^2 minus cross talk) from disjoint pairs
// (cross talk only). Throws InvalidRegime when the value is non-positive,
// reporting the largest s that would keep it positive.
double default_threshold(const ModelParams& p, double mu0_effective);

// Open interval of thresholds for which the graph is provably sound and
// complete on instances with measured incoherence mu0_hat:
//   lo = s^2 M^2 mu0_hat / sqrt(d)   (max disjoint-pair cross talk)
//   hi = m^2 - lo                    (min shared-pair signal)
// Empty (lo >= hi) when the incoherence is too large for the sparsity.
struct SeparationInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  bool contains(double rho) const { return lo < rho && rho < hi; }
};
SeparationInterval separation_interval(const ModelParams& p, double mu0_hat);

// Exact all-pairs threshold scan, O(n^2 d). The Gram matrix is formed in
// column blocks so memory stays O(n * block) instead of O(n^2).
CorrelationGraph build_graph(const SampleSet& samples, double rho);

// Sorted intersection of the neighbor lists of i and j, excluding i and j.
// Throws NotAnEdge when (i, j) is not an edge.
std::vector<int> common_neighbors(const CorrelationGraph& G, int i, int j);

}  // namespace overdict
