#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "overdict/clustering.hpp"
#include "overdict/errors.hpp"
#include "overdict/eval.hpp"
#include "overdict/model.hpp"
#include "overdict/rng.hpp"

using namespace overdict;

namespace {

Matrix random_unit_columns(int d, int r, std::uint64_t seed) {
  Rng rng(seed);
  Matrix A(d, r);
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < d; ++i) A(i, j) = rng.normal();
    A.col(j).normalize();
  }
  return A;
}

// Synthetic sample set with hand-picked supports (values +-1), for oracle
// tests that only look at the ground truth.
SampleSet handmade_truth(int r, const std::vector<std::vector<int>>& supports) {
  const int n = static_cast<int>(supports.size());
  SampleSet S;
  GroundTruth gt;
  gt.A.A = Matrix::Identity(r, r);
  gt.X.X = Matrix::Zero(r, n);
  gt.X.supports = supports;
  for (int j = 0; j < n; ++j)
    for (int idx : supports[static_cast<std::size_t>(j)]) gt.X.X(idx, j) = 1.0;
  S.Y = gt.A.A * gt.X.X;
  S.truth = std::move(gt);
  return S;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("identical dictionaries match with zero error") {
  Dictionary A;
  A.A = random_unit_columns(8, 6, 1);
  const Matching m = match_dictionaries(A, A);
  REQUIRE(m.permutation.size() == 6);
  for (int j = 0; j < 6; ++j) {
    CHECK(m.permutation[static_cast<std::size_t>(j)] == j);
    CHECK(m.signs[static_cast<std::size_t>(j)] == 1);
  }
  CHECK(m.eps_A <= 1e-12);
  CHECK(m.unmatched_true.empty());
}

TEST_CASE("reversal and negation are matched away") {
  Dictionary A;
  A.A = random_unit_columns(8, 6, 2);
  Dictionary B;
  B.A = Matrix(8, 6);
  for (int j = 0; j < 6; ++j) B.A.col(j) = -A.A.col(5 - j);
  const Matching m = match_dictionaries(A, B);
  for (int j = 0; j < 6; ++j) {
    CHECK(m.permutation[static_cast<std::size_t>(j)] == 5 - j);
    CHECK(m.signs[static_cast<std::size_t>(j)] == -1);
  }
  CHECK(m.eps_A <= 1e-12);
}

TEST_CASE("assignment cost equals the factorial brute force") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    Dictionary A, B;
    A.A = random_unit_columns(8, 8, 100 + t);
    B.A = random_unit_columns(8, 8, 200 + t);
    const Matching m = match_dictionaries(A, B);
    double total = 0.0;
    for (double e : m.per_atom_error) total += e * e;
    CHECK(total == doctest::Approx(oracle::brute_force_match_cost(A.A, B.A))
                       .epsilon(1e-10));
  }
}

TEST_CASE("permuted signed copies have zero distance") {
  Dictionary A;
  A.A = random_unit_columns(10, 7, 5);
  Rng rng(6);
  std::vector<int> perm(7);
  for (int i = 0; i < 7; ++i) perm[static_cast<std::size_t>(i)] = i;
  rng.shuffle(perm);
  Dictionary B;
  B.A = Matrix(10, 7);
  for (int j = 0; j < 7; ++j)
    B.A.col(j) = rng.sign() * A.A.col(perm[static_cast<std::size_t>(j)]);
  const Matching m = match_dictionaries(A, B);
  CHECK(m.eps_A <= 1e-12);
  CHECK(m.mean_error <= 1e-12);
}

TEST_CASE("surplus estimates stay unmatched, missing atoms are reported") {
  Dictionary A;
  A.A = random_unit_columns(8, 5, 7);
  Dictionary more;
  more.A = Matrix(8, 7);
  more.A.leftCols(5) = A.A;
  more.A.col(5) = random_unit_columns(8, 1, 8);
  more.A.col(6) = random_unit_columns(8, 1, 9);
  const Matching m1 = match_dictionaries(A, more);
  int unmatched_est = 0;
  for (int v : m1.permutation)
    if (v < 0) ++unmatched_est;
  CHECK(unmatched_est == 2);
  CHECK(m1.unmatched_true.empty());
  CHECK(m1.eps_A <= 1e-12);  // the five genuine copies pair up at zero cost

  Dictionary fewer;
  fewer.A = A.A.leftCols(3);
  const Matching m2 = match_dictionaries(A, fewer);
  CHECK(m2.unmatched_true.size() == 2);
  CHECK(m2.eps_A <= 1e-12);
}

TEST_CASE("error bound arithmetic and monotonicity") {
  ModelParams p;
  p.d = 10000; p.r = 1000000; p.s = 1; p.m = 1.0; p.M = 1.0; p.mu1 = 1.0;
  const double v = theoretical_error_bound(p, 0.01);
  // 32 * (0.01 + 1e-4 + 1e-6 + 1e-4 + 0.01) = 0.646432
  CHECK(v == doctest::Approx(0.646432).epsilon(1e-12));

  ModelParams q = p;
  q.d = 64; q.r = 128; q.mu1 = 1.2;
  double prev = 0.0;
  for (int s = 1; s <= 4; ++s) {
    q.s = s;
    const double cur = theoretical_error_bound(q, 0.01);
    CHECK(cur > prev);
    prev = cur;
  }

  // the alpha = 0 limit drops the alpha terms
  ModelParams z = p;
  const double at_zero = theoretical_error_bound(z, 0.0);
  CHECK(at_zero == doctest::Approx(32.0 * (0.01 + 1e-4 + 1e-6)).epsilon(1e-12));

  CHECK_THROWS_AS(theoretical_error_bound(p, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_error_bound(p, -0.001), std::invalid_argument);
}

TEST_CASE("valid-regime graphs pass the soundness and completeness scan") {
  ModelParams p;
  p.d = 64; p.r = 128; p.s = 2; p.m = 1.0; p.M = 1.0;
  const Dictionary A = generate_dictionary(p, 30);
  const CoefficientMatrix X = generate_coefficients(p, 1000, 31);
  const SampleSet Y = synthesize(A, X);
  const CoherenceStats st = coherence_stats(A);
  const SeparationInterval iv = separation_interval(p, st.mu0_hat);
  REQUIRE(!iv.empty());
  const CorrelationGraph G = build_graph(Y, 0.5 * (iv.lo + iv.hi));
  const CorrGraphReport rep = verify_corr_graph(G, Y, p);
  CHECK(rep.clean());
  CHECK(rep.rho_in_interval);
  CHECK(rep.pairs_checked == 1000LL * 999 / 2);
}

TEST_CASE("a threshold far below the interval shows disjoint-support edges") {
  ModelParams p;
  p.d = 64; p.r = 128; p.s = 2; p.m = 1.0; p.M = 1.0;
  const Dictionary A = generate_dictionary(p, 32);
  const CoefficientMatrix X = generate_coefficients(p, 500, 33);
  const SampleSet Y = synthesize(A, X);
  const CorrelationGraph G = build_graph(Y, 0.0001);
  const CorrGraphReport rep = verify_corr_graph(G, Y, p);
  CHECK(!rep.rho_in_interval);
  CHECK(rep.corr2_violations > 0);  // disjoint supports still correlate a bit
  CHECK(!rep.corr2_samples.empty());
}

TEST_CASE("single-sample graphs are vacuously clean") {
  ModelParams p;
  p.d = 32; p.r = 48; p.s = 2; p.m = 1.0; p.M = 1.0;
  p.mu0 = 0.68;  // keeps the admissible interval nonempty at this size
  const Dictionary A = generate_dictionary(p, 34);
  const CoefficientMatrix X = generate_coefficients(p, 1, 35);
  const SampleSet Y = synthesize(A, X);
  const CorrelationGraph G = build_graph(Y, 0.5);
  const CorrGraphReport rep = verify_corr_graph(G, Y, p);
  CHECK(rep.clean());
  CHECK(rep.pairs_checked == 0);
}

TEST_CASE("an empty admissible interval is not scannable") {
  ModelParams p;
  p.d = 4; p.r = 8; p.s = 2; p.m = 1.0; p.M = 1.0;
  p.mu0 = 4.0;  // loose declaration so generation succeeds
  const Dictionary A = generate_dictionary(p, 36);
  const CoefficientMatrix X = generate_coefficients(p, 50, 37);
  const SampleSet Y = synthesize(A, X);
  const CorrelationGraph G = build_graph(Y, 0.5);
  // d=4, r=8 forces mu0_hat >= 4 * Welch ~ 0.98, so lo >= hi
  CHECK_THROWS_AS(verify_corr_graph(G, Y, p), RegimeNotApplicable);
}

TEST_CASE("missing ground truth is rejected") {
  SampleSet S;
  S.Y = Matrix::Identity(4, 4);
  const CorrelationGraph G = build_graph(S, 0.5);
  ModelParams p;
  p.d = 4; p.r = 4; p.s = 1; p.m = 1.0; p.M = 1.0;
  CHECK_THROWS_AS(verify_corr_graph(G, S, p), std::invalid_argument);
}

TEST_CASE("unique intersection oracle counts shared atoms") {
  const SampleSet S = handmade_truth(
      8, {{1, 2, 3}, {3, 4, 5}, {1, 2, 3}, {6, 7}, {0, 6}});
  CHECK(unique_intersection_oracle(S, 0, 1));   // intersection {3}
  CHECK(!unique_intersection_oracle(S, 0, 2));  // identical supports
  CHECK(!unique_intersection_oracle(S, 0, 3));  // disjoint
  CHECK(unique_intersection_oracle(S, 3, 4));   // intersection {6}
}

TEST_CASE("agreement is perfect in a two-atom single-support world") {
  // two orthogonal atoms, every sample is +-1 times one of them
  const int n = 40;
  Matrix Y(4, n);
  SampleSet S;
  GroundTruth gt;
  gt.A.A = Matrix::Identity(4, 4).leftCols(2);
  gt.X.X = Matrix::Zero(2, n);
  Rng rng(38);
  for (int j = 0; j < n; ++j) {
    const int atom = j % 2;
    const double val = rng.sign();
    gt.X.X(atom, j) = val;
    gt.X.supports.push_back({atom});
    Y.col(j) = val * gt.A.A.col(atom);
  }
  S.Y = Y;
  S.truth = std::move(gt);
  const CorrelationGraph G = build_graph(S, 0.5);
  const AgreementReport rep = procedure_agreement(S, G, 50, 7);
  CHECK(rep.agreement == 1.0);
  CHECK(rep.fp == 0);
  CHECK(rep.fn == 0);
  CHECK(rep.tn == 0);
  CHECK(rep.tp + rep.skipped == 50);
}

TEST_CASE("confusion counts add up") {
  ModelParams p;
  p.d = 32; p.r = 48; p.s = 2; p.m = 1.0; p.M = 1.0;
  p.mu0 = 0.68;
  const Dictionary A = generate_dictionary(p, 39);
  const CoefficientMatrix X = generate_coefficients(p, 3000, 40);
  const SampleSet Y = synthesize(A, X);
  const CoherenceStats st = coherence_stats(A);
  const SeparationInterval iv = separation_interval(p, st.mu0_hat);
  REQUIRE(!iv.empty());
  const CorrelationGraph G = build_graph(Y, 0.5 * (iv.lo + iv.hi));
  const AgreementReport rep = procedure_agreement(Y, G, 120, 8);
  CHECK(rep.tp + rep.fp + rep.tn + rep.fn + rep.skipped == 120);
  CHECK(rep.sampled == 120);
  CHECK(rep.agreement >= 0.0);
  CHECK(rep.agreement <= 1.0);
  CHECK(!rep.regime_ok);  // 1536 * 8 > 48
}

TEST_CASE("agreement sampling needs edges") {
  SampleSet S;
  S.Y = Matrix::Identity(6, 6);
  GroundTruth gt;
  gt.A.A = Matrix::Identity(6, 6);
  gt.X.X = Matrix::Identity(6, 6);
  for (int j = 0; j < 6; ++j) gt.X.supports.push_back({j});
  S.truth = std::move(gt);
  const CorrelationGraph G = build_graph(S, 0.5);  // orthogonal: no edges
  CHECK_THROWS_AS(procedure_agreement(S, G, 10, 1), EmptySample);

  // and a nonzero sample count
  Matrix Y(2, 4);
  Y << 1, 1, 0, 0,
       0, 0, 1, 1;
  SampleSet S2;
  S2.Y = Y;
  GroundTruth gt2;
  gt2.A.A = Matrix::Identity(2, 2);
  gt2.X.X = Matrix::Zero(2, 4);
  gt2.X.supports = {{0}, {0}, {1}, {1}};
  for (int j = 0; j < 4; ++j) gt2.X.X(gt2.X.supports[static_cast<std::size_t>(j)][0], j) = 1.0;
  S2.truth = std::move(gt2);
  const CorrelationGraph G2 = build_graph(S2, 0.5);
  REQUIRE(G2.edge_count() == 2);
  CHECK_THROWS_AS(procedure_agreement(S2, G2, 0, 1), EmptySample);
}

}  // TEST_SUITE
