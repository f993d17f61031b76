#include "overdict/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>

#include "overdict/errors.hpp"
#include "overdict/rng.hpp"

namespace overdict {

bool unique_intersection_test(const std::vector<int>& shat,
                              const CorrelationGraph& G, std::uint64_t seed,
                              int min_cluster) {
  if (static_cast<int>(shat.size()) < min_cluster)
    throw ClusterTooSmall("cluster of size " + std::to_string(shat.size()) +
                          " is below the floor of " +
                          std::to_string(min_cluster));
  std::vector<int> order = shat;
  Rng rng(seed);
  rng.shuffle(order);
  const long long total = static_cast<long long>(order.size() / 2);
  long long edge_pairs = 0;
  for (long long p = 0; p < total; ++p) {
    if (G.has_edge(order[static_cast<std::size_t>(2 * p)],
                   order[static_cast<std::size_t>(2 * p + 1)]))
      ++edge_pairs;
  }
  return intersection_vote_passes(edge_pairs, total);
}

SpectralEstimate estimate_element(const std::vector<int>& shat,
                                  const SampleSet& samples) {
  if (shat.empty()) throw EmptyCluster("cannot estimate from an empty cluster");
  const int d = samples.d();
  Matrix Ys(d, static_cast<int>(shat.size()));
  for (std::size_t k = 0; k < shat.size(); ++k) {
    const int idx = shat[k];
    if (idx < 0 || idx >= samples.n())
      throw std::invalid_argument("cluster index " + std::to_string(idx) +
                                  " out of range");
    Ys.col(static_cast<int>(k)) = samples.Y.col(idx);
  }
  const Matrix second_moment = Ys * Ys.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(second_moment);

  SpectralEstimate out;
  out.top_eigenvalue = eig.eigenvalues()(d - 1);
  const double runner_up = d >= 2 ? eig.eigenvalues()(d - 2) : 0.0;
  out.spectral_gap = out.top_eigenvalue - runner_up;
  out.degenerate = out.spectral_gap <= 1e-10;
  out.direction = eig.eigenvectors().col(d - 1);
  for (int i = 0; i < d; ++i) {
    if (std::abs(out.direction(i)) > 1e-12) {
      if (out.direction(i) < 0.0) out.direction = -out.direction;
      break;
    }
  }
  return out;
}

DictionaryEstimate dictionary_learn(const SampleSet& samples,
                                    const CorrelationGraph& G,
                                    const LearnOptions& opt) {
  if (opt.rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
  if (!(opt.eps_dict > 0.0 && opt.eps_dict < 0.5))
    throw std::invalid_argument("eps_dict must lie in (0, 1/2)");
  if (opt.max_atoms != -1 && opt.max_atoms < 1)
    throw std::invalid_argument("max_atoms must be -1 or positive");
  if (opt.min_cluster < 2)
    throw std::invalid_argument("min_cluster must be at least 2");

  std::vector<std::pair<int, int>> order = G.edges;
  Rng edge_rng(derive_seed(opt.seed, Stream::edge_order));
  edge_rng.shuffle(order);

  const int d = samples.d();
  std::vector<Vector> atoms;
  std::vector<AtomProvenance> provenance;
  std::vector<int> cluster;  // reused across the edge loop
  for (const auto& [i, j] : order) {
    if (opt.max_atoms != -1 &&
        static_cast<int>(atoms.size()) >= opt.max_atoms)
      break;

    cluster.clear();
    const std::vector<int>& ni = G.neighbors[static_cast<std::size_t>(i)];
    const std::vector<int>& nj = G.neighbors[static_cast<std::size_t>(j)];
    std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(),
                          std::back_inserter(cluster));
    if (static_cast<int>(cluster.size()) < opt.min_cluster) continue;

    // the verdict seed depends on the endpoints, not the visit position
    const std::uint64_t edge_seed =
        derive_seed(opt.seed, Stream::anchor_test, static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(j));
    if (!unique_intersection_test(cluster, G, edge_seed, opt.min_cluster))
      continue;

    const SpectralEstimate est = estimate_element(cluster, samples);
    bool separated = true;
    for (const Vector& b : atoms) {
      const double dist =
          std::sqrt(std::min((b - est.direction).squaredNorm(),
                             (b + est.direction).squaredNorm()));
      if (!(dist > 2.0 * opt.eps_dict)) {
        separated = false;
        break;
      }
    }
    if (!separated) continue;

    atoms.push_back(est.direction);
    provenance.push_back({i, j, static_cast<int>(cluster.size())});
  }

  if (atoms.empty())
    throw NoAtomsRecovered("no anchor edge produced an estimate (" +
                           std::to_string(order.size()) + " edges visited)");

  DictionaryEstimate out;
  out.atoms.resize(d, static_cast<int>(atoms.size()));
  for (std::size_t k = 0; k < atoms.size(); ++k)
    out.atoms.col(static_cast<int>(k)) = atoms[k];
  out.provenance = std::move(provenance);
  return out;
}

DictionaryEstimate dictionary_learn(const SampleSet& samples, double rho,
                                    double eps_dict, std::uint64_t seed,
                                    int max_atoms) {
  LearnOptions opt;
  opt.rho = rho;
  opt.eps_dict = eps_dict;
  opt.seed = seed;
  opt.max_atoms = max_atoms;
  // validate before paying for the graph build
  if (opt.rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
  if (!(opt.eps_dict > 0.0 && opt.eps_dict < 0.5))
    throw std::invalid_argument("eps_dict must lie in (0, 1/2)");
  const CorrelationGraph G = build_graph(samples, rho);
  return dictionary_learn(samples, G, opt);
}

}  // namespace overdict
