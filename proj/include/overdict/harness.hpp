#pragma once

// Experiment driver shared by the CLI: configuration parsing with grid
// expansion, seeded end-to-end runs, artifact persistence, and flat CSV
// report rows.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "overdict/types.hpp"

namespace overdict {

struct ExperimentConfig {
  ModelParams model;
  int n = 0;
  double alpha = 0.01;              // accuracy parameter, must be in (0, 1/20)
  double delta = 0.01;              // failure-probability parameter
  double sample_multiplier = 10.0;  // stand-in for the unspecified constant
                                    // in the sample-complexity suggestion
  std::optional<double> rho;        // unset: use default_threshold at the
                                    // measured incoherence
  std::optional<double> eps_dict;   // unset: derived from the error bound
  std::optional<double> eps_coeff;  // unset: s * eps_A from stage 1
  std::uint64_t seed = 0;
  bool stage_cluster = true;
  bool stage_postprocess = true;
  int max_atoms = -1;               // -1: use r
  int agreement_samples = 200;
  std::string output_dir;           // empty: keep everything in memory

  void validate() const;            // throws ConfigError
  double n_suggest() const;         // sample_multiplier * (r/(alpha^2 s)) * log(d/delta)
  std::string stages_string() const;
};

struct ReportRow {
  ExperimentConfig cfg;             // as resolved for the run
  std::string status = "ok";        // "ok" or the name of the aborting error

  double n_suggest = 0.0;
  double mu0_hat = 0.0;
  double mu1_hat = 0.0;

  double rho_used = 0.0;
  double eps_dict_used = 0.0;
  double eps_coeff_used = 0.0;
  long long edges = -1;

  // -1 means the check did not run (stage skipped or regime not applicable).
  long long corr1_violations = -1;
  long long corr2_violations = -1;
  int rho_in_interval = -1;

  double procedure_agreement = -1.0;
  int recovered_atoms = -1;
  double eps_A_stage1 = -1.0;
  int exact_recovery = -1;
  double eps_A_stage2 = -1.0;
  double frac_within_eps = -1.0;

  // Wall-clock timings are process-local metadata for CLI display. They are
  // never part of the CSV schema, which keeps persisted rows bit-identical
  // across reruns of the same config.
  double wall_gen_ms = 0.0;
  double wall_graph_ms = 0.0;
  double wall_cluster_ms = 0.0;
  double wall_post_ms = 0.0;

  static std::string csv_header();
  std::string to_csv() const;
};

// Ordered key=value pairs; order matters for grid expansion.
using KvList = std::vector<std::pair<std::string, std::string>>;

// Flat key=value file: one pair per line, '#' comments, blank lines ignored.
KvList parse_kv_file(const std::string& path);

// Apply one key=value setting. Unknown keys and malformed values throw
// ConfigError. Comma-separated values are rejected here (grid syntax).
void apply_kv(ExperimentConfig& cfg, const std::string& key,
              const std::string& value);

// Strict single config: every value scalar. Throws ConfigError.
ExperimentConfig config_from_kv(const KvList& kv);

// Cartesian expansion: any value with commas becomes a sweep axis, expanded
// in file order (later keys vary fastest). The stages key uses '+' between
// stage names so it never collides with list syntax.
std::vector<ExperimentConfig> expand_grid(const KvList& kv);

// One seeded end-to-end run. Generates the instance, resolves the threshold
// (configured override, else the default formula at the measured
// incoherence), runs the requested stages, evaluates against ground truth,
// and persists artifacts plus report.csv under cfg.output_dir when set.
// Stage errors land in the row's status field; only ConfigError escapes.
ReportRow run_experiment(const ExperimentConfig& cfg);

// Runs every config (artifacts under <out_dir>/run_NNNN), writing one
// cumulative CSV with a header to <out_dir>/sweep.csv. Row order follows the
// grid. Individual failures become status values, never aborts.
std::vector<ReportRow> sweep(const std::vector<ExperimentConfig>& grid,
                             const std::string& out_dir);

}  // namespace overdict
