#pragma once

// Permutation/sign-invariant dictionary comparison, the first-stage error
// bound, and ground-truth oracles for the graph and the intersection test.

#include <cstdint>
#include <utility>
#include <vector>

#include "overdict/corr_graph.hpp"
#include "overdict/types.hpp"

namespace overdict {

struct Matching {
  // permutation[j] = index of the true atom assigned to estimated atom j,
  // or -1 when the estimate is unmatched (possible only when k > r).
  std::vector<int> permutation;
  std::vector<int> signs;               // z in {-1,+1}; 0 when unmatched
  std::vector<double> per_atom_error;   // ||z*a_{perm[j]} - ahat_j||_2
  double eps_A = 0.0;                   // max over matched estimates
  double mean_error = 0.0;
  std::vector<int> unmatched_true;      // true atoms no estimate was assigned
};

// Optimal assignment between true and estimated atoms under the cost
// c(i, j) = min_z ||z*a_i - ahat_j||^2 (Hungarian method on the square-padded
// cost matrix). Requires matching ambient dimension.
Matching match_dictionaries(const Dictionary& A, const Dictionary& Ahat);

// First-stage error bound (32 s M^2 / m^2) * (mu1/sqrt(ds) + mu1^2/d
// + s^3/r + alpha^2 + alpha/sqrt(s)), evaluated with the declared mu1.
// Requires alpha in [0, 1/20); alpha = 0 gives the limiting bound with the
// accuracy terms dropped.
double theoretical_error_bound(const ModelParams& p, double alpha);

struct CorrGraphReport {
  long long corr1_violations = 0;  // pairs sharing exactly one atom, no edge
  long long corr2_violations = 0;  // edges whose pair shares no atom
  std::vector<std::pair<int, int>> corr1_samples;  // first few violators
  std::vector<std::pair<int, int>> corr2_samples;
  double mu0_hat = 0.0;
  double rho = 0.0;
  SeparationInterval interval;   // admissible (lo, hi) at measured mu0_hat
  bool rho_in_interval = false;
  long long pairs_checked = 0;

  bool clean() const { return corr1_violations == 0 && corr2_violations == 0; }
};

// Exhaustive scan of all sample pairs against the ground-truth supports:
// every edge must share an atom, every pair sharing exactly one atom must be
// an edge. Throws RegimeNotApplicable when the admissible interval is empty
// at the measured incoherence, and std::invalid_argument without ground
// truth. A rho outside a nonempty interval is scanned and reported honestly
// (rho_in_interval = false) since out-of-regime behavior is itself of
// interest.
CorrGraphReport verify_corr_graph(const CorrelationGraph& G,
                                  const SampleSet& samples,
                                  const ModelParams& p);

// True iff the supports of samples i and j intersect in exactly one atom.
bool unique_intersection_oracle(const SampleSet& samples, int i, int j);

struct AgreementReport {
  double agreement = 0.0;  // (tp + tn) / evaluated
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  int sampled = 0;   // anchor edges drawn (with replacement)
  int skipped = 0;   // drawn edges whose cluster was below min_cluster
  bool regime_ok = false;  // s^3 <= r / 1536
};

// Sample anchor edges with replacement and compare the pair-split test
// verdict with the ground-truth unique-intersection predicate. Per-edge test
// seeds derive from (seed, i, j) exactly as in dictionary_learn. Throws
// EmptySample when there are no edges, sample_count < 1, or every draw was
// skipped.
AgreementReport procedure_agreement(const SampleSet& samples,
                                    const CorrelationGraph& G,
                                    int sample_count, std::uint64_t seed,
                                    int min_cluster = 4);

}  // namespace overdict
