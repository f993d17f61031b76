#pragma once

// First-stage estimation: iterate anchor edges of the correlation graph,
// keep those whose common neighborhood passes the pair-split intersection
// test, estimate one atom per accepted cluster as the top eigenvector of the
// cluster's second-moment matrix, and deduplicate by sign-aware separation.

#include <cstdint>
#include <vector>

#include "overdict/corr_graph.hpp"
#include "overdict/types.hpp"

namespace overdict {

struct SpectralEstimate {
  Vector direction;            // unit norm; first nonzero component positive
  double top_eigenvalue = 0.0;
  double spectral_gap = 0.0;   // top eigenvalue minus the second
  bool degenerate = false;     // gap within 1e-10 (diagnostic, not an error)
};

struct AtomProvenance {
  int anchor_i = -1;
  int anchor_j = -1;
  int cluster_size = 0;
};

struct DictionaryEstimate {
  Matrix atoms;  // d x k, unit-norm columns
  std::vector<AtomProvenance> provenance;

  int count() const { return static_cast<int>(atoms.cols()); }
};

// Acceptance rule of the pair-split test: strictly more than 61/64 of the
// pairs must be edges. Integer arithmetic keeps the boundary exact
// (61 of 64 fails, 62 of 64 passes).
inline bool intersection_vote_passes(long long edge_pairs,
                                     long long total_pairs) {
  return 64 * edge_pairs > 61 * total_pairs;
}

// Randomly pair up the cluster (seeded shuffle; one element is dropped when
// the size is odd) and count how many pairs are edges of G. Accept iff
// intersection_vote_passes(edge pairs, total pairs). Throws ClusterTooSmall
// when |shat| < min_cluster.
bool unique_intersection_test(const std::vector<int>& shat,
                              const CorrelationGraph& G, std::uint64_t seed,
                              int min_cluster = 4);

// Top eigenvector of sum_{i in shat} y_i y_i^T, computed from the d x d
// accumulated matrix. Throws EmptyCluster. A vanishing spectral gap is
// flagged as degenerate but still returns the estimate.
SpectralEstimate estimate_element(const std::vector<int>& shat,
                                  const SampleSet& samples);

struct LearnOptions {
  double rho = 0.0;
  double eps_dict = 0.0;   // must lie in (0, 1/2)
  std::uint64_t seed = 0;
  int max_atoms = -1;      // stop early after this many atoms; -1 = no cap
  int min_cluster = 4;     // anchor edges with smaller clusters are skipped
};

// Full first stage against a prebuilt graph. Edges are visited in a seeded
// random order; per-edge test seeds derive from (seed, i, j) so verdicts are
// independent of the visit order. A new estimate is kept only when its
// sign-aware distance min_z ||z*b - b'|| to every stored atom exceeds
// 2*eps_dict. Throws NoAtomsRecovered when the loop ends empty.
DictionaryEstimate dictionary_learn(const SampleSet& samples,
                                    const CorrelationGraph& G,
                                    const LearnOptions& opt);

// Convenience overload that builds the graph at threshold rho first.
DictionaryEstimate dictionary_learn(const SampleSet& samples, double rho,
                                    double eps_dict, std::uint64_t seed,
                                    int max_atoms = -1);

}  // namespace overdict
