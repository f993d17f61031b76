#include "overdict/harness.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "overdict/clustering.hpp"
#include "overdict/corr_graph.hpp"
#include "overdict/csv_io.hpp"
#include "overdict/errors.hpp"
#include "overdict/eval.hpp"
#include "overdict/model.hpp"
#include "overdict/sparse_recovery.hpp"

namespace overdict {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  if (value.empty()) throw ConfigError(key + ": empty integer value");
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (*end != '\0' || end == value.c_str() || v < INT_MIN || v > INT_MAX)
    throw ConfigError(key + ": not an integer: '" + value + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (value.empty() ||
      value.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": not an unsigned integer: '" + value + "'");
  errno = 0;
  const unsigned long long v = std::strtoull(value.c_str(), nullptr, 10);
  if (errno == ERANGE)
    throw ConfigError(key + ": out of range: '" + value + "'");
  return static_cast<std::uint64_t>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value.empty()) throw ConfigError(key + ": empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (*end != '\0' || end == value.c_str())
    throw ConfigError(key + ": not a number: '" + value + "'");
  return v;
}

std::string value_model_name(ValueModel vm) {
  return vm == ValueModel::BernoulliSigned ? "bernoulli" : "uniform";
}

void write_provenance_csv(const std::string& path,
                          const std::vector<AtomProvenance>& prov) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "atom_index,anchor_i,anchor_j,cluster_size\n";
  for (std::size_t k = 0; k < prov.size(); ++k)
    out << k << ',' << prov[k].anchor_i << ',' << prov[k].anchor_j << ','
        << prov[k].cluster_size << '\n';
  if (!out) throw Error("failed writing " + path);
}

// Unset eps_dict falls back to the first-stage bound when it is informative
// and to the widest admissible separation radius when the bound is vacuous
// (which it is at desk scale).
double default_eps_dict(const ModelParams& p, double alpha) {
  const double bound = theoretical_error_bound(p, alpha);
  return std::sqrt(std::clamp(bound, 1e-16, 0.2499));
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Exact recovery: every true atom is matched and, per matched pair, the
// estimated coefficient row carries exactly the true sign pattern.
bool exact_sign_recovery(const CoefficientMatrix& X, const Matrix& Xhat,
                         const Matching& m, int r_true) {
  if (static_cast<int>(Xhat.rows()) != r_true) return false;
  if (!m.unmatched_true.empty()) return false;
  const int n = static_cast<int>(Xhat.cols());
  for (int j = 0; j < static_cast<int>(m.permutation.size()); ++j) {
    const int i = m.permutation[static_cast<std::size_t>(j)];
    if (i < 0) return false;
    const int z = m.signs[static_cast<std::size_t>(j)];
    for (int t = 0; t < n; ++t)
      if (sign_of(Xhat(j, t)) != z * sign_of(X.X(i, t))) return false;
  }
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (n < 1) throw ConfigError("n must be a positive integer");
  if (!(alpha > 0.0 && alpha < 0.05))
    throw ConfigError("alpha must lie in (0, 1/20)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("delta must lie in (0, 1)");
  if (!(sample_multiplier > 0.0))
    throw ConfigError("sample_multiplier must be positive");
  if (rho && !(*rho > 0.0)) throw ConfigError("rho must be positive");
  if (eps_dict && !(*eps_dict > 0.0 && *eps_dict < 0.5))
    throw ConfigError("eps_dict must lie in (0, 1/2)");
  if (eps_coeff && !(*eps_coeff >= 0.0))
    throw ConfigError("eps_coeff must be nonnegative");
  if (max_atoms != -1 && max_atoms < 1)
    throw ConfigError("max_atoms must be -1 or positive");
  if (agreement_samples < 1)
    throw ConfigError("agreement_samples must be positive");
}

double ExperimentConfig::n_suggest() const {
  return sample_multiplier *
         (static_cast<double>(model.r) / (alpha * alpha * model.s)) *
         std::log(static_cast<double>(model.d) / delta);
}

std::string ExperimentConfig::stages_string() const {
  if (stage_cluster && stage_postprocess) return "cluster+postprocess";
  if (stage_cluster) return "cluster";
  if (stage_postprocess) return "postprocess";
  return "none";
}

std::string ReportRow::csv_header() {
  return "d,r,s,m,M,mu0,mu1,value_model,n,alpha,delta,sample_multiplier,"
         "rho,eps_dict,eps_coeff,seed,stages,max_atoms,agreement_samples,"
         "status,n_suggest,mu0_hat,mu1_hat,rho_used,eps_dict_used,"
         "eps_coeff_used,edges,corr1_violations,corr2_violations,"
         "rho_in_interval,procedure_agreement,recovered_atoms,eps_A_stage1,"
         "exact_recovery,eps_A_stage2,frac_within_eps";
}

std::string ReportRow::to_csv() const {
  std::vector<std::string> f;
  f.push_back(std::to_string(cfg.model.d));
  f.push_back(std::to_string(cfg.model.r));
  f.push_back(std::to_string(cfg.model.s));
  f.push_back(format_double(cfg.model.m));
  f.push_back(format_double(cfg.model.M));
  f.push_back(format_double(cfg.model.mu0));
  f.push_back(format_double(cfg.model.mu1));
  f.push_back(value_model_name(cfg.model.value_model));
  f.push_back(std::to_string(cfg.n));
  f.push_back(format_double(cfg.alpha));
  f.push_back(format_double(cfg.delta));
  f.push_back(format_double(cfg.sample_multiplier));
  f.push_back(cfg.rho ? format_double(*cfg.rho) : "");
  f.push_back(cfg.eps_dict ? format_double(*cfg.eps_dict) : "");
  f.push_back(cfg.eps_coeff ? format_double(*cfg.eps_coeff) : "");
  f.push_back(std::to_string(cfg.seed));
  f.push_back(cfg.stages_string());
  f.push_back(std::to_string(cfg.max_atoms));
  f.push_back(std::to_string(cfg.agreement_samples));
  f.push_back(status);
  f.push_back(format_double(n_suggest));
  f.push_back(format_double(mu0_hat));
  f.push_back(format_double(mu1_hat));
  f.push_back(format_double(rho_used));
  f.push_back(format_double(eps_dict_used));
  f.push_back(format_double(eps_coeff_used));
  f.push_back(std::to_string(edges));
  f.push_back(std::to_string(corr1_violations));
  f.push_back(std::to_string(corr2_violations));
  f.push_back(std::to_string(rho_in_interval));
  f.push_back(format_double(procedure_agreement));
  f.push_back(std::to_string(recovered_atoms));
  f.push_back(format_double(eps_A_stage1));
  f.push_back(std::to_string(exact_recovery));
  f.push_back(format_double(eps_A_stage2));
  f.push_back(format_double(frac_within_eps));

  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += f[i];
  }
  return out;
}

KvList parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  KvList out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("missing '=' in config line: " + stripped);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key in config line: " + stripped);
    out.emplace_back(key, value);
  }
  return out;
}

void apply_kv(ExperimentConfig& cfg, const std::string& key,
              const std::string& value) {
  if (value.find(',') != std::string::npos)
    throw ConfigError(key + ": list values are only valid in sweep grids");

  if (key == "d") {
    cfg.model.d = parse_int(key, value);
  } else if (key == "r") {
    cfg.model.r = parse_int(key, value);
  } else if (key == "s") {
    cfg.model.s = parse_int(key, value);
  } else if (key == "m") {
    cfg.model.m = parse_double(key, value);
  } else if (key == "M") {
    cfg.model.M = parse_double(key, value);
  } else if (key == "mu0") {
    cfg.model.mu0 = parse_double(key, value);
  } else if (key == "mu1") {
    cfg.model.mu1 = parse_double(key, value);
  } else if (key == "value_model") {
    if (value == "bernoulli")
      cfg.model.value_model = ValueModel::BernoulliSigned;
    else if (value == "uniform")
      cfg.model.value_model = ValueModel::UniformSymmetric;
    else
      throw ConfigError("value_model must be 'bernoulli' or 'uniform', got '" +
                        value + "'");
  } else if (key == "n") {
    cfg.n = parse_int(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "delta") {
    cfg.delta = parse_double(key, value);
  } else if (key == "sample_multiplier") {
    cfg.sample_multiplier = parse_double(key, value);
  } else if (key == "rho") {
    cfg.rho = parse_double(key, value);
  } else if (key == "eps_dict") {
    cfg.eps_dict = parse_double(key, value);
  } else if (key == "eps_coeff") {
    cfg.eps_coeff = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "stages") {
    bool cluster = false, post = false;
    if (value != "none") {
      std::size_t start = 0;
      if (value.empty()) throw ConfigError("stages: empty value");
      while (true) {
        const std::size_t plus = value.find('+', start);
        const std::string tok =
            value.substr(start, plus == std::string::npos ? std::string::npos
                                                          : plus - start);
        if (tok == "cluster")
          cluster = true;
        else if (tok == "postprocess")
          post = true;
        else
          throw ConfigError("unknown stage name '" + tok + "'");
        if (plus == std::string::npos) break;
        start = plus + 1;
      }
    }
    cfg.stage_cluster = cluster;
    cfg.stage_postprocess = post;
  } else if (key == "max_atoms") {
    cfg.max_atoms = parse_int(key, value);
  } else if (key == "agreement_samples") {
    cfg.agreement_samples = parse_int(key, value);
  } else if (key == "out") {
    cfg.output_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig config_from_kv(const KvList& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) apply_kv(cfg, key, value);
  cfg.validate();
  return cfg;
}

std::vector<ExperimentConfig> expand_grid(const KvList& kv) {
  std::vector<ExperimentConfig> configs(1);
  for (const auto& [key, value] : kv) {
    std::vector<std::string> parts;
    if (key != "stages" && key != "out" &&
        value.find(',') != std::string::npos) {
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = value.find(',', start);
        parts.push_back(value.substr(
            start,
            comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    } else {
      parts.push_back(value);
    }

    std::vector<ExperimentConfig> next;
    next.reserve(configs.size() * parts.size());
    for (const ExperimentConfig& base : configs) {
      for (const std::string& part : parts) {
        ExperimentConfig c = base;
        apply_kv(c, key, trim(part));
        next.push_back(std::move(c));
      }
    }
    configs = std::move(next);
  }
  for (const ExperimentConfig& c : configs) c.validate();
  return configs;
}

ReportRow run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ReportRow row;
  row.cfg = cfg;
  row.n_suggest = cfg.n_suggest();

  const bool persist = !cfg.output_dir.empty();
  if (persist) fs::create_directories(cfg.output_dir);
  const auto path_of = [&cfg](const char* name) {
    return (fs::path(cfg.output_dir) / name).string();
  };

  using clock = std::chrono::steady_clock;
  const auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0)
        .count();
  };

  try {
    auto t0 = clock::now();
    const Dictionary A = generate_dictionary(cfg.model, cfg.seed);
    const CoefficientMatrix X = generate_coefficients(cfg.model, cfg.n, cfg.seed);
    const SampleSet Y = synthesize(A, X);
    const CoherenceStats st = coherence_stats(A);
    row.mu0_hat = st.mu0_hat;
    row.mu1_hat = st.mu1_hat;
    if (persist) {
      write_matrix_csv(path_of("A.csv"), A.A);
      write_matrix_csv(path_of("X.csv"), X.X);
      write_supports_csv(path_of("supports.csv"), X.supports);
      write_matrix_csv(path_of("Y.csv"), Y.Y);
    }
    row.wall_gen_ms = ms_since(t0);

    // with the cluster stage disabled, the second stage refines the
    // generating dictionary itself (isolates the refinement path)
    Dictionary Abar = A;

    if (cfg.stage_cluster) {
      row.rho_used =
          cfg.rho ? *cfg.rho : default_threshold(cfg.model, st.mu0_hat);
      row.eps_dict_used =
          cfg.eps_dict ? *cfg.eps_dict : default_eps_dict(cfg.model, cfg.alpha);

      t0 = clock::now();
      const CorrelationGraph G = build_graph(Y, row.rho_used);
      row.edges = static_cast<long long>(G.edge_count());
      if (persist) write_graph_csv(path_of("graph.csv"), G);
      row.wall_graph_ms = ms_since(t0);

      t0 = clock::now();
      try {
        const CorrGraphReport rep = verify_corr_graph(G, Y, cfg.model);
        row.corr1_violations = rep.corr1_violations;
        row.corr2_violations = rep.corr2_violations;
        row.rho_in_interval = rep.rho_in_interval ? 1 : 0;
      } catch (const RegimeNotApplicable&) {
        // sentinels already mark the scan as not applicable
      }
      try {
        row.procedure_agreement =
            procedure_agreement(Y, G, cfg.agreement_samples, cfg.seed)
                .agreement;
      } catch (const EmptySample&) {
      }

      LearnOptions opt;
      opt.rho = row.rho_used;
      opt.eps_dict = row.eps_dict_used;
      opt.seed = cfg.seed;
      opt.max_atoms = cfg.max_atoms == -1 ? cfg.model.r : cfg.max_atoms;
      const DictionaryEstimate est = dictionary_learn(Y, G, opt);
      row.recovered_atoms = est.count();
      Abar.A = est.atoms;
      if (persist) {
        write_matrix_csv(path_of("Abar.csv"), est.atoms);
        write_provenance_csv(path_of("provenance.csv"), est.provenance);
      }
      row.eps_A_stage1 = match_dictionaries(A, Abar).eps_A;
      row.wall_cluster_ms = ms_since(t0);
    }

    if (cfg.stage_postprocess) {
      t0 = clock::now();
      const double stage1_floor =
          cfg.stage_cluster ? std::max(row.eps_A_stage1, 1e-12) : 1e-12;
      row.eps_coeff_used =
          cfg.eps_coeff ? *cfg.eps_coeff : cfg.model.s * stage1_floor;
      const RecoveryResult res =
          recover_coeff(Y, Abar, cfg.model.s, row.eps_coeff_used);
      if (persist) {
        write_matrix_csv(path_of("Ahat.csv"), res.Ahat.A);
        write_matrix_csv(path_of("Xhat.csv"), res.Xhat);
      }
      const Matching m = match_dictionaries(A, res.Ahat);
      row.eps_A_stage2 = m.eps_A;
      row.frac_within_eps = res.frac_within_eps;
      row.exact_recovery =
          exact_sign_recovery(X, res.Xhat, m, cfg.model.r) ? 1 : 0;
      row.wall_post_ms = ms_since(t0);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InfeasibleIncoherence&) {
    row.status = "InfeasibleIncoherence";
  } catch (const InvalidRegime&) {
    row.status = "InvalidRegime";
  } catch (const NoAtomsRecovered&) {
    row.status = "NoAtomsRecovered";
  } catch (const IllConditionedSupport&) {
    row.status = "IllConditionedSupport";
  } catch (const SingularGram&) {
    row.status = "SingularGram";
  } catch (const Error&) {
    row.status = "Error";
  }

  if (persist) {
    std::ofstream out(path_of("report.csv"), std::ios::binary);
    if (!out) throw Error("cannot open report.csv for writing");
    out << ReportRow::csv_header() << "\n" << row.to_csv() << "\n";
    if (!out) throw Error("failed writing report.csv");
  }
  return row;
}

std::vector<ReportRow> sweep(const std::vector<ExperimentConfig>& grid,
                             const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "sweep.csv", std::ios::binary);
  if (!out) throw Error("cannot open sweep.csv for writing");
  out << ReportRow::csv_header() << "\n";

  std::vector<ReportRow> rows;
  rows.reserve(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    char name[16];
    std::snprintf(name, sizeof(name), "run_%04d", static_cast<int>(idx));
    ExperimentConfig cfg = grid[idx];
    cfg.output_dir = (fs::path(out_dir) / name).string();
    ReportRow row;
    try {
      row = run_experiment(cfg);
    } catch (const ConfigError&) {
      row.cfg = cfg;
      row.status = "ConfigError";
    }
    out << row.to_csv() << "\n";
    rows.push_back(std::move(row));
  }
  if (!out) throw Error("failed writing sweep.csv");
  return rows;
}

}  // namespace overdict
