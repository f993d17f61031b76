#include "overdict/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "overdict/errors.hpp"

namespace overdict {

SparseCodeResult sparse_code(const Dictionary& Abar, const Vector& y, int s,
                             double eps_coeff) {
  const int d = Abar.d();
  const int r = Abar.r();
  if (static_cast<int>(y.size()) != d)
    throw DimensionMismatch("sample has " + std::to_string(y.size()) +
                            " entries but the dictionary lives in dimension " +
                            std::to_string(d));
  if (s < 1 || s > r) throw std::invalid_argument("s must lie in [1, r]");
  if (eps_coeff < 0.0)
    throw std::invalid_argument("eps_coeff must be nonnegative");
  for (int j = 0; j < r; ++j)
    if (std::abs(Abar.A.col(j).norm() - 1.0) > 1e-6)
      throw std::invalid_argument("dictionary column " + std::to_string(j) +
                                  " is not unit norm");

  Vector residual = y;
  double rnorm = residual.norm();
  std::vector<int> selected;
  std::vector<char> used(static_cast<std::size_t>(r), 0);
  Vector coef;
  Matrix As;
  while (static_cast<int>(selected.size()) < s && rnorm > eps_coeff) {
    const Vector corr = Abar.A.transpose() * residual;
    int best = -1;
    double best_mag = -1.0;
    for (int idx = 0; idx < r; ++idx) {
      if (used[static_cast<std::size_t>(idx)]) continue;
      const double mag = std::abs(corr(idx));
      if (mag > best_mag) {  // strict: ties resolve to the lowest index
        best_mag = mag;
        best = idx;
      }
    }
    used[static_cast<std::size_t>(best)] = 1;
    selected.push_back(best);

    const int k = static_cast<int>(selected.size());
    As.resize(d, k);
    for (int t = 0; t < k; ++t)
      As.col(t) = Abar.A.col(selected[static_cast<std::size_t>(t)]);
    Eigen::JacobiSVD<Matrix> svd(As,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(k - 1);
    if (smin * 1e8 < smax)
      throw IllConditionedSupport(
          "selected columns have condition number above 1e8");
    coef = svd.solve(y);
    residual = y - As * coef;
    rnorm = residual.norm();
  }

  SparseCodeResult out;
  out.xhat = Vector::Zero(r);
  for (std::size_t t = 0; t < selected.size(); ++t)
    out.xhat(selected[t]) = coef(static_cast<int>(t));
  out.support = selected;
  std::sort(out.support.begin(), out.support.end());
  out.residual_norm = rnorm;
  return out;
}

Matrix threshold_signs(const Matrix& Xhat) {
  Matrix out = Matrix::Zero(Xhat.rows(), Xhat.cols());
  for (int j = 0; j < Xhat.cols(); ++j)
    for (int i = 0; i < Xhat.rows(); ++i) {
      const double v = Xhat(i, j);
      if (v >= 0.5)
        out(i, j) = 1.0;
      else if (v <= -0.5)
        out(i, j) = -1.0;
    }
  return out;
}

Dictionary reestimate_dictionary(const SampleSet& samples, const Matrix& Xhat) {
  if (static_cast<int>(Xhat.cols()) != samples.n())
    throw DimensionMismatch("coefficients cover " +
                            std::to_string(Xhat.cols()) + " samples but " +
                            std::to_string(samples.n()) + " were given");

  const Matrix gram = Xhat * Xhat.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double emax = eig.eigenvalues().maxCoeff();
  const double emin = eig.eigenvalues().minCoeff();
  if (!(emax > 0.0) || emin < 1e-10 * emax)
    throw SingularGram("coefficient Gram matrix is singular or near-singular");

  // Ahat = Y Xhat^T gram^{-1}, solved without forming the inverse
  Dictionary out;
  out.A = gram.ldlt()
              .solve((samples.Y * Xhat.transpose()).transpose())
              .transpose();
  for (int j = 0; j < out.r(); ++j) {
    const double nrm = out.A.col(j).norm();
    if (nrm > 0.0) out.A.col(j) /= nrm;
  }
  return out;
}

RecoveryResult recover_coeff(const SampleSet& samples, const Dictionary& Abar,
                             int s, double eps_coeff) {
  const int n = samples.n();
  if (n < 1) throw std::invalid_argument("sample set is empty");

  RecoveryResult out;
  Matrix raw(Abar.r(), n);
  out.residual_norms.resize(static_cast<std::size_t>(n));
  int within = 0;
  for (int j = 0; j < n; ++j) {
    const SparseCodeResult code =
        sparse_code(Abar, samples.Y.col(j), s, eps_coeff);
    raw.col(j) = code.xhat;
    out.residual_norms[static_cast<std::size_t>(j)] = code.residual_norm;
    if (code.residual_norm <= eps_coeff) ++within;
  }
  out.frac_within_eps = static_cast<double>(within) / n;

  out.Xhat = threshold_signs(raw);
  out.support_sizes.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    int nnz = 0;
    for (int i = 0; i < out.Xhat.rows(); ++i)
      if (out.Xhat(i, j) != 0.0) ++nnz;
    out.support_sizes[static_cast<std::size_t>(j)] = nnz;
  }
  out.Ahat = reestimate_dictionary(samples, out.Xhat);
  return out;
}

}  // namespace overdict
