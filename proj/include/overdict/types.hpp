#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "overdict/errors.hpp"

namespace overdict {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Distribution of the nonzero coefficient values.
enum class ValueModel {
  BernoulliSigned,   // exactly +1 or -1, equiprobable (requires m = M = 1)
  UniformSymmetric,  // magnitude uniform on [m, M], sign equiprobable
};

struct ModelParams {
  int d = 0;  // ambient dimension
  int r = 0;  // number of atoms
  int s = 0;  // nonzeros per sample
  double m = 1.0;  // minimum nonzero magnitude
  double M = 1.0;  // maximum nonzero magnitude
  double mu0 = 1.0;  // declared incoherence: max |<a_i,a_j>| <= mu0/sqrt(d)
  double mu1 = 2.0;  // declared spectral bound: ||A||_2 <= mu1*sqrt(r/d)
  ValueModel value_model = ValueModel::BernoulliSigned;

  // Throws ConfigError on violated constraints.
  void validate() const;
};

// d x r matrix with unit-norm columns.
struct Dictionary {
  Matrix A;

  int d() const { return static_cast<int>(A.rows()); }
  int r() const { return static_cast<int>(A.cols()); }
};

// r x n matrix whose columns each have exactly s nonzeros; the support of
// every column is recorded explicitly (sorted ascending).
struct CoefficientMatrix {
  Matrix X;
  std::vector<std::vector<int>> supports;

  int r() const { return static_cast<int>(X.rows()); }
  int n() const { return static_cast<int>(X.cols()); }
};

struct GroundTruth {
  Dictionary A;
  CoefficientMatrix X;
};

// d x n sample matrix Y = A*X, carrying the generating pair when synthetic.
struct SampleSet {
  Matrix Y;
  std::optional<GroundTruth> truth;

  int d() const { return static_cast<int>(Y.rows()); }
  int n() const { return static_cast<int>(Y.cols()); }
};

inline void ModelParams::validate() const {
  if (d < 1) throw ConfigError("d must be a positive integer");
  if (r < 1) throw ConfigError("r must be a positive integer");
  if (s < 1) throw ConfigError("s must be a positive integer");
  if (s > r) throw ConfigError("s must not exceed r");
  if (s > d) throw ConfigError("s must not exceed d");
  if (!(m > 0.0)) throw ConfigError("m must be positive");
  if (!(M >= m)) throw ConfigError("M must be at least m");
  if (!(mu0 >= 0.0)) throw ConfigError("mu0 must be nonnegative");
  if (!(mu1 > 0.0)) throw ConfigError("mu1 must be positive");
  if (value_model == ValueModel::BernoulliSigned && (m != 1.0 || M != 1.0))
    throw ConfigError("the signed Bernoulli value model requires m = M = 1");
}

}  // namespace overdict
