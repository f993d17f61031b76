#include "overdict/corr_graph.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "overdict/errors.hpp"

namespace overdict {

bool CorrelationGraph::has_edge(int i, int j) const {
  if (i == j) return false;
  // scan the shorter adjacency list
  const std::vector<int>& a = neighbors[static_cast<std::size_t>(i)];
  const std::vector<int>& b = neighbors[static_cast<std::size_t>(j)];
  const std::vector<int>& shorter = a.size() <= b.size() ? a : b;
  const int target = a.size() <= b.size() ? j : i;
  return std::binary_search(shorter.begin(), shorter.end(), target);
}

double default_threshold(const ModelParams& p, double mu0_effective) {
  const double sqrt_d = std::sqrt(static_cast<double>(p.d));
  const double cross_talk =
      static_cast<double>(p.s) * p.s * p.M * p.M * mu0_effective / sqrt_d;
  const double rho = 0.5 * p.m * p.m - cross_talk;
  if (rho <= 0.0) {
    int max_s = 0;
    for (int cand = p.s - 1; cand >= 1; --cand) {
      const double c =
          static_cast<double>(cand) * cand * p.M * p.M * mu0_effective / sqrt_d;
      if (0.5 * p.m * p.m - c > 0.0) {
        max_s = cand;
        break;
      }
    }
    throw InvalidRegime("default correlation threshold is non-positive at s = " +
                            std::to_string(p.s),
                        max_s);
  }
  return rho;
}

SeparationInterval separation_interval(const ModelParams& p, double mu0_hat) {
  SeparationInterval iv;
  iv.lo = static_cast<double>(p.s) * p.s * p.M * p.M * mu0_hat /
          std::sqrt(static_cast<double>(p.d));
  iv.hi = p.m * p.m - iv.lo;
  return iv;
}

CorrelationGraph build_graph(const SampleSet& samples, double rho) {
  const int n = samples.n();
  CorrelationGraph G;
  G.n = n;
  G.rho = rho;
  G.neighbors.assign(static_cast<std::size_t>(n), {});

  const int block = 512;
  Matrix gram;
  for (int j0 = 0; j0 < n; j0 += block) {
    const int w = std::min(block, n - j0);
    gram.noalias() = samples.Y.transpose() * samples.Y.middleCols(j0, w);
    for (int b = 0; b < w; ++b) {
      const int j = j0 + b;
      for (int i = 0; i < j; ++i) {
        if (std::abs(gram(i, b)) > rho) {
          G.neighbors[static_cast<std::size_t>(i)].push_back(j);
          G.neighbors[static_cast<std::size_t>(j)].push_back(i);
          G.edges.emplace_back(i, j);
        }
      }
    }
  }

  for (auto& lst : G.neighbors) std::sort(lst.begin(), lst.end());
  std::sort(G.edges.begin(), G.edges.end());
  return G;
}

std::vector<int> common_neighbors(const CorrelationGraph& G, int i, int j) {
  if (!G.has_edge(i, j))
    throw NotAnEdge("(" + std::to_string(i) + ", " + std::to_string(j) +
                    ") is not an edge");
  const std::vector<int>& a = G.neighbors[static_cast<std::size_t>(i)];
  const std::vector<int>& b = G.neighbors[static_cast<std::size_t>(j)];
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  // i and j can never appear: a excludes i (no self loops) and holds j only,
  // which b excludes
  return out;
}

}  // namespace overdict
