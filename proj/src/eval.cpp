#include "overdict/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "overdict/clustering.hpp"
#include "overdict/errors.hpp"
#include "overdict/model.hpp"
#include "overdict/rng.hpp"

namespace overdict {

namespace {

// Assignment with potentials, O(N^3). cost is N x N, row-major; returns the
// column assigned to each row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost,
                                     int N) {
  const double INF = 1e18;
  std::vector<double> u(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(N) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(N) + 1, 0);
  for (int i = 1; i <= N; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(N) + 1, INF);
    std::vector<char> used(static_cast<std::size_t>(N) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = INF;
      for (int j = 1; j <= N; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)]
                               [static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= N; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(N), -1);
  for (int j = 1; j <= N; ++j)
    if (p[static_cast<std::size_t>(j)] >= 1)
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
          j - 1;
  return row_to_col;
}

int support_overlap(const std::vector<int>& a, const std::vector<int>& b) {
  int count = 0;
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x] < b[y]) {
      ++x;
    } else if (a[x] > b[y]) {
      ++y;
    } else {
      ++count;
      ++x;
      ++y;
    }
  }
  return count;
}

}  // namespace

Matching match_dictionaries(const Dictionary& A, const Dictionary& Ahat) {
  if (A.d() != Ahat.d())
    throw DimensionMismatch("dictionaries live in different dimensions");
  const int r = A.r();
  const int k = Ahat.r();
  const int N = std::max(r, k);

  // rows are estimates, columns are true atoms; padding entries cost nothing
  // so surplus on either side is absorbed by dummies
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(N),
      std::vector<double>(static_cast<std::size_t>(N), 0.0));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < r; ++i) {
      const double dot = A.A.col(i).dot(Ahat.A.col(j));
      cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          A.A.col(i).squaredNorm() + Ahat.A.col(j).squaredNorm() -
          2.0 * std::abs(dot);
    }
  const std::vector<int> assign = min_cost_assignment(cost, N);

  Matching m;
  m.permutation.assign(static_cast<std::size_t>(k), -1);
  m.signs.assign(static_cast<std::size_t>(k), 0);
  m.per_atom_error.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<char> taken(static_cast<std::size_t>(r), 0);
  int matched = 0;
  for (int j = 0; j < k; ++j) {
    const int col = assign[static_cast<std::size_t>(j)];
    if (col < 0 || col >= r) continue;  // assigned to a padding column
    const double dot = A.A.col(col).dot(Ahat.A.col(j));
    const int z = dot >= 0.0 ? 1 : -1;
    m.permutation[static_cast<std::size_t>(j)] = col;
    m.signs[static_cast<std::size_t>(j)] = z;
    m.per_atom_error[static_cast<std::size_t>(j)] =
        (z * A.A.col(col) - Ahat.A.col(j)).norm();
    m.eps_A = std::max(m.eps_A, m.per_atom_error[static_cast<std::size_t>(j)]);
    m.mean_error += m.per_atom_error[static_cast<std::size_t>(j)];
    taken[static_cast<std::size_t>(col)] = 1;
    ++matched;
  }
  if (matched > 0) m.mean_error /= matched;
  for (int i = 0; i < r; ++i)
    if (!taken[static_cast<std::size_t>(i)]) m.unmatched_true.push_back(i);
  return m;
}

double theoretical_error_bound(const ModelParams& p, double alpha) {
  p.validate();
  if (!(alpha >= 0.0 && alpha < 0.05))
    throw std::invalid_argument("alpha must lie in [0, 1/20)");
  const double s = static_cast<double>(p.s);
  const double d = static_cast<double>(p.d);
  const double r = static_cast<double>(p.r);
  const double prefactor = 32.0 * s * p.M * p.M / (p.m * p.m);
  const double terms = p.mu1 / std::sqrt(d * s) + p.mu1 * p.mu1 / d +
                       s * s * s / r + alpha * alpha + alpha / std::sqrt(s);
  return prefactor * terms;
}

CorrGraphReport verify_corr_graph(const CorrelationGraph& G,
                                  const SampleSet& samples,
                                  const ModelParams& p) {
  if (!samples.truth.has_value())
    throw std::invalid_argument("graph verification needs ground truth");
  if (G.n != samples.n())
    throw DimensionMismatch("graph covers " + std::to_string(G.n) +
                            " samples, sample set has " +
                            std::to_string(samples.n()));

  CorrGraphReport rep;
  rep.mu0_hat = coherence_stats(samples.truth->A).mu0_hat;
  rep.interval = separation_interval(p, rep.mu0_hat);
  if (rep.interval.empty())
    throw RegimeNotApplicable(
        "the admissible threshold interval is empty at measured incoherence " +
        std::to_string(rep.mu0_hat));
  rep.rho = G.rho;
  rep.rho_in_interval = rep.interval.contains(G.rho);

  const auto& supports = samples.truth->X.supports;
  const int n = samples.n();
  constexpr int kMaxSamples = 10;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const int overlap = support_overlap(supports[static_cast<std::size_t>(i)],
                                          supports[static_cast<std::size_t>(j)]);
      const bool edge = G.has_edge(i, j);
      if (overlap == 1 && !edge) {
        ++rep.corr1_violations;
        if (static_cast<int>(rep.corr1_samples.size()) < kMaxSamples)
          rep.corr1_samples.emplace_back(i, j);
      } else if (overlap == 0 && edge) {
        ++rep.corr2_violations;
        if (static_cast<int>(rep.corr2_samples.size()) < kMaxSamples)
          rep.corr2_samples.emplace_back(i, j);
      }
    }
  }
  rep.pairs_checked = static_cast<long long>(n) * (n - 1) / 2;
  return rep;
}

bool unique_intersection_oracle(const SampleSet& samples, int i, int j) {
  if (!samples.truth.has_value())
    throw std::invalid_argument("the intersection oracle needs ground truth");
  const auto& supports = samples.truth->X.supports;
  if (i < 0 || j < 0 || i >= samples.n() || j >= samples.n())
    throw std::invalid_argument("sample index out of range");
  return support_overlap(supports[static_cast<std::size_t>(i)],
                         supports[static_cast<std::size_t>(j)]) == 1;
}

AgreementReport procedure_agreement(const SampleSet& samples,
                                    const CorrelationGraph& G,
                                    int sample_count, std::uint64_t seed,
                                    int min_cluster) {
  if (!samples.truth.has_value())
    throw std::invalid_argument("agreement estimation needs ground truth");
  if (sample_count < 1)
    throw EmptySample("agreement sample count must be positive");
  if (G.edges.empty())
    throw EmptySample("the graph has no anchor edges to sample");

  AgreementReport rep;
  rep.sampled = sample_count;
  const long long s_true =
      samples.truth->X.supports.empty()
          ? 0
          : static_cast<long long>(samples.truth->X.supports[0].size());
  rep.regime_ok =
      s_true > 0 && 1536LL * s_true * s_true * s_true <= samples.truth->X.r();

  Rng pick(derive_seed(seed, Stream::agreement));
  std::vector<int> cluster;
  for (int t = 0; t < sample_count; ++t) {
    const auto [i, j] =
        G.edges[static_cast<std::size_t>(pick.next_below(G.edges.size()))];
    cluster.clear();
    const std::vector<int>& ni = G.neighbors[static_cast<std::size_t>(i)];
    const std::vector<int>& nj = G.neighbors[static_cast<std::size_t>(j)];
    std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(),
                          std::back_inserter(cluster));
    if (static_cast<int>(cluster.size()) < min_cluster) {
      ++rep.skipped;
      continue;
    }
    const bool verdict = unique_intersection_test(
        cluster, G,
        derive_seed(seed, Stream::anchor_test, static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(j)),
        min_cluster);
    const bool truth = unique_intersection_oracle(samples, i, j);
    if (verdict && truth)
      ++rep.tp;
    else if (verdict && !truth)
      ++rep.fp;
    else if (!verdict && !truth)
      ++rep.tn;
    else
      ++rep.fn;
  }
  const long long evaluated = rep.tp + rep.fp + rep.tn + rep.fn;
  if (evaluated == 0)
    throw EmptySample("every sampled anchor edge was below the cluster floor");
  rep.agreement = static_cast<double>(rep.tp + rep.tn) / evaluated;
  return rep;
}

}  // namespace overdict
