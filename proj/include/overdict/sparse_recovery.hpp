#pragma once

// Second-stage refinement: per-sample orthogonal matching pursuit against the
// approximate dictionary, sign thresholding, least-squares dictionary
// re-estimation, and column normalization.

#include <vector>

#include "overdict/types.hpp"

namespace overdict {

struct SparseCodeResult {
  Vector xhat;               // length r, zero off the selected support
  std::vector<int> support;  // sorted, size <= s
  double residual_norm = 0.0;
};

// Greedy OMP: s iterations of most-correlated-column selection with a full
// least-squares refit each round, stopping early once the residual norm drops
// to eps_coeff or below. Correlation ties resolve to the lowest column index.
// Throws IllConditionedSupport when the selected sub-dictionary's condition
// number exceeds 1e8, and DimensionMismatch on shape violations. Columns of
// Abar must be unit norm within 1e-6.
SparseCodeResult sparse_code(const Dictionary& Abar, const Vector& y, int s,
                             double eps_coeff);

// Entrywise: |v| < 1/2 maps to 0, v >= 1/2 to +1, v <= -1/2 to -1. Intended
// for instances whose true nonzeros are +-1.
Matrix threshold_signs(const Matrix& Xhat);

// Least-squares dictionary fit Ahat = Y Xhat^T (Xhat Xhat^T)^{-1} via a
// factorization of the r x r Gram matrix, followed by column normalization.
// Throws SingularGram when sigma_min(Xhat Xhat^T) < 1e-10 * sigma_max.
Dictionary reestimate_dictionary(const SampleSet& samples, const Matrix& Xhat);

struct RecoveryResult {
  Dictionary Ahat;
  Matrix Xhat;                        // thresholded signs, r x n
  std::vector<int> support_sizes;     // per column, after thresholding
  std::vector<double> residual_norms; // per column, from the OMP stage
  double frac_within_eps = 0.0;       // fraction of residuals <= eps_coeff
};

// Full second stage: sparse_code per column, threshold_signs, reestimate.
// frac_within_eps is the recovery-health statistic: near 1 when Abar is a
// genuine approximation of the generating dictionary, near 0 otherwise.
RecoveryResult recover_coeff(const SampleSet& samples, const Dictionary& Abar,
                             int s, double eps_coeff);

}  // namespace overdict
