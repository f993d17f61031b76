#pragma once

#include <stdexcept>
#include <string>

namespace overdict {

// Base for every library error so callers can catch the whole family.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampling could not reach the declared incoherence within the
// attempt budget. Carries the best value achieved for diagnostics.
class InfeasibleIncoherence : public Error {
 public:
  InfeasibleIncoherence(const std::string& what, double best)
      : Error(what), best_mu0_hat(best) {}
  double best_mu0_hat;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Exhaustive support enumeration guard tripped.
class TooLargeToEnumerate : public Error {
 public:
  using Error::Error;
};

// The default correlation threshold came out non-positive. Carries the
// largest sparsity for which the threshold would still be positive.
class InvalidRegime : public Error {
 public:
  InvalidRegime(const std::string& what, int max_s)
      : Error(what), max_admissible_s(max_s) {}
  int max_admissible_s;
};

class NotAnEdge : public Error {
 public:
  using Error::Error;
};

class ClusterTooSmall : public Error {
 public:
  using Error::Error;
};

class EmptyCluster : public Error {
 public:
  using Error::Error;
};

class NoAtomsRecovered : public Error {
 public:
  using Error::Error;
};

class IllConditionedSupport : public Error {
 public:
  using Error::Error;
};

class SingularGram : public Error {
 public:
  using Error::Error;
};

// The admissible threshold interval is empty, so the graph soundness and
// completeness checks do not apply at any rho.
class RegimeNotApplicable : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace overdict
