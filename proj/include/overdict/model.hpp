#pragma once

// Synthetic instance generation and measurement of the model constants:
// pairwise incoherence, spectral norm, and exhaustive RIP constants.

#include <cstdint>

#include "overdict/types.hpp"

namespace overdict {

struct CoherenceStats {
  double mu0_hat = 0.0;  // max_{i != j} |<a_i, a_j>| * sqrt(d)
  double mu1_hat = 0.0;  // ||A||_2 * sqrt(d / r)
};

// Random unit-norm dictionary satisfying the declared incoherence bounds.
//
// r <= d: orthonormalize a square Gaussian draw (measured mu0_hat is 0).
// r > d: accept/reject loop of at most max_attempts tries. Raw normalized
// Gaussian columns are far too coherent at desk scale (the Gram off-diagonals
// concentrate around sqrt(d) * mu0_hat of 3-4), so each attempt polishes its
// draw with a deterministic coherence-reduction sweep (alternating projection
// between the clipped Gram matrix and the rank-d PSD cone) before the accept
// test measured mu0_hat <= mu0 and measured mu1_hat <= mu1.
//
// Throws InfeasibleIncoherence after max_attempts failures, reporting the
// best mu0_hat achieved.
Dictionary generate_dictionary(const ModelParams& p, std::uint64_t seed,
                               int max_attempts = 200);

// n columns, each with a uniformly random s-subset of {0..r-1} as support and
// nonzero values drawn per the value model.
CoefficientMatrix generate_coefficients(const ModelParams& p, int n,
                                        std::uint64_t seed);

// Y = A * X with ground truth attached. Throws DimensionMismatch.
SampleSet synthesize(const Dictionary& A, const CoefficientMatrix& X);

// Measured incoherence and spectral constants (exhaustive pairwise scan and a
// full SVD respectively).
CoherenceStats coherence_stats(const Dictionary& A);

// Exact order-k restricted isometry constant by enumerating all C(r, k)
// column subsets: max over subsets S of max(1 - sigma_min^2(A_S),
// sigma_max^2(A_S) - 1). Throws TooLargeToEnumerate when C(r, k) exceeds
// max_supports, and DimensionMismatch when k exceeds d or r.
double rip_constant(const Dictionary& A, int k,
                    std::int64_t max_supports = 1000000);

}  // namespace overdict
