#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "overdict/clustering.hpp"
#include "overdict/corr_graph.hpp"
#include "overdict/csv_io.hpp"
#include "overdict/errors.hpp"
#include "overdict/eval.hpp"
#include "overdict/harness.hpp"
#include "overdict/model.hpp"
#include "overdict/sparse_recovery.hpp"

namespace fs = std::filesystem;
using namespace overdict;

namespace {

// Every subcommand shares one flag set; each flag maps onto a config key so
// file values and flag values flow through the same parser (flags win by
// being applied last).
class ConfigFlags {
 public:
  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path_,
                    "key=value config file (one pair per line)");
    add(sub, "--d", "d", "signal dimension");
    add(sub, "--r", "r", "number of dictionary atoms");
    add(sub, "--s", "s", "nonzeros per sample");
    add(sub, "--m", "m", "minimum nonzero magnitude");
    add(sub, "--M", "M", "maximum nonzero magnitude");
    add(sub, "--mu0", "mu0", "declared pairwise incoherence target");
    add(sub, "--mu1", "mu1", "declared spectral norm target");
    add(sub, "--value-model", "value_model", "bernoulli or uniform");
    add(sub, "--n", "n", "sample count");
    add(sub, "--alpha", "alpha", "accuracy parameter in (0, 1/20)");
    add(sub, "--delta", "delta", "failure-probability parameter in (0, 1)");
    add(sub, "--sample-multiplier", "sample_multiplier",
        "constant in the suggested sample count");
    add(sub, "--rho", "rho", "correlation threshold override");
    add(sub, "--eps-dict", "eps_dict", "separation radius override");
    add(sub, "--eps-coeff", "eps_coeff", "residual stopping override");
    add(sub, "--seed", "seed", "64-bit unsigned seed");
    add(sub, "--stages", "stages",
        "cluster+postprocess, cluster, postprocess, or none");
    add(sub, "--max-atoms", "max_atoms", "cap on accepted atoms (-1 caps at r)");
    add(sub, "--agreement-samples", "agreement_samples",
        "anchor edges sampled for the verdict check");
    add(sub, "--out", "out", "output directory for artifacts");
  }

  // Config file first, then flags in declaration order.
  KvList collect() const {
    KvList kv;
    if (!config_path_.empty()) kv = parse_kv_file(config_path_);
    for (const auto& e : entries_)
      if (e.opt->count() > 0) kv.emplace_back(e.key, *e.value);
    return kv;
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::string key;
    std::unique_ptr<std::string> value;
  };

  void add(CLI::App* sub, const char* flag, const char* key,
           const char* desc) {
    auto value = std::make_unique<std::string>();
    CLI::Option* opt = sub->add_option(flag, *value, desc)
                           ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    entries_.push_back(Entry{opt, key, std::move(value)});
  }

  std::string config_path_;
  std::vector<Entry> entries_;
};

std::string yes_no(int flag) { return flag == 1 ? "yes" : "no"; }

void print_row(const ReportRow& row) {
  const ExperimentConfig& c = row.cfg;
  std::printf("status            %s\n", row.status.c_str());
  std::printf("stages            %s\n", c.stages_string().c_str());
  std::printf("d,r,s             %d,%d,%d\n", c.model.d, c.model.r, c.model.s);
  std::printf("n                 %d (suggested %.3g)\n", c.n, row.n_suggest);
  std::printf("seed              %llu\n",
              static_cast<unsigned long long>(c.seed));
  std::printf("mu0_hat, mu1_hat  %.6g, %.6g\n", row.mu0_hat, row.mu1_hat);
  if (c.stage_cluster) {
    std::printf("rho_used          %.17g\n", row.rho_used);
    std::printf("eps_dict_used     %.17g\n", row.eps_dict_used);
    if (row.edges >= 0) std::printf("edges             %lld\n", row.edges);
    if (row.rho_in_interval >= 0)
      std::printf("lemma scan        corr1=%lld corr2=%lld (rho in interval: %s)\n",
                  row.corr1_violations, row.corr2_violations,
                  yes_no(row.rho_in_interval).c_str());
    else if (row.edges >= 0)
      std::printf("lemma scan        skipped (separation interval empty)\n");
    if (row.procedure_agreement >= 0.0)
      std::printf("agreement         %.6g\n", row.procedure_agreement);
    if (row.recovered_atoms >= 0)
      std::printf("recovered_atoms   %d\n", row.recovered_atoms);
    if (row.eps_A_stage1 >= 0.0)
      std::printf("eps_A stage 1     %.6g\n", row.eps_A_stage1);
  }
  if (c.stage_postprocess && row.status == "ok") {
    std::printf("eps_coeff_used    %.17g\n", row.eps_coeff_used);
    std::printf("exact_recovery    %s\n", yes_no(row.exact_recovery).c_str());
    std::printf("eps_A stage 2     %.6g\n", row.eps_A_stage2);
    std::printf("frac_within_eps   %.6g\n", row.frac_within_eps);
  }
  std::printf("wall ms           gen=%.1f graph=%.1f cluster=%.1f post=%.1f\n",
              row.wall_gen_ms, row.wall_graph_ms, row.wall_cluster_ms,
              row.wall_post_ms);
  if (!c.output_dir.empty())
    std::printf("artifacts         %s\n", c.output_dir.c_str());
}

struct Instance {
  Dictionary A;
  CoefficientMatrix X;
  SampleSet Y;
  CoherenceStats stats;
};

Instance make_instance(const ExperimentConfig& cfg) {
  Instance inst;
  inst.A = generate_dictionary(cfg.model, cfg.seed);
  inst.X = generate_coefficients(cfg.model, cfg.n, cfg.seed);
  inst.Y = synthesize(inst.A, inst.X);
  inst.stats = coherence_stats(inst.A);
  return inst;
}

void persist_instance(const ExperimentConfig& cfg, const Instance& inst) {
  if (cfg.output_dir.empty()) return;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_matrix_csv((dir / "A.csv").string(), inst.A.A);
  write_matrix_csv((dir / "X.csv").string(), inst.X.X);
  write_supports_csv((dir / "supports.csv").string(), inst.X.supports);
  write_matrix_csv((dir / "Y.csv").string(), inst.Y.Y);
}

double resolve_rho(const ExperimentConfig& cfg, double mu0_hat) {
  return cfg.rho ? *cfg.rho : default_threshold(cfg.model, mu0_hat);
}

int status_exit(const ReportRow& row) { return row.status == "ok" ? 0 : 1; }

int cmd_gen(const ConfigFlags& flags) {
  ExperimentConfig cfg = config_from_kv(flags.collect());
  cfg.stage_cluster = false;
  cfg.stage_postprocess = false;
  const ReportRow row = run_experiment(cfg);
  print_row(row);
  return status_exit(row);
}

int cmd_graph(const ConfigFlags& flags) {
  const ExperimentConfig cfg = config_from_kv(flags.collect());
  const Instance inst = make_instance(cfg);
  const double rho = resolve_rho(cfg, inst.stats.mu0_hat);
  const CorrelationGraph G = build_graph(inst.Y, rho);
  persist_instance(cfg, inst);
  if (!cfg.output_dir.empty())
    write_graph_csv((fs::path(cfg.output_dir) / "graph.csv").string(), G);
  std::printf("n                 %d\n", G.n);
  std::printf("rho               %.17g\n", rho);
  std::printf("edges             %zu\n", G.edge_count());
  std::printf("mu0_hat, mu1_hat  %.6g, %.6g\n", inst.stats.mu0_hat,
              inst.stats.mu1_hat);
  if (!cfg.output_dir.empty())
    std::printf("artifacts         %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_cluster(const ConfigFlags& flags) {
  ExperimentConfig cfg = config_from_kv(flags.collect());
  cfg.stage_cluster = true;
  cfg.stage_postprocess = false;
  const ReportRow row = run_experiment(cfg);
  print_row(row);
  return status_exit(row);
}

int cmd_recover(const ConfigFlags& flags, const std::string& abar_path) {
  ExperimentConfig cfg = config_from_kv(flags.collect());
  if (abar_path.empty()) {
    cfg.stage_cluster = false;
    cfg.stage_postprocess = true;
    const ReportRow row = run_experiment(cfg);
    print_row(row);
    return status_exit(row);
  }

  // Refine a dictionary estimate loaded from disk against a regenerated
  // instance (same config and seed as the run that produced the estimate).
  const Instance inst = make_instance(cfg);
  Dictionary Abar{read_matrix_csv(abar_path)};
  const Matching before = match_dictionaries(inst.A, Abar);
  const double eps_coeff =
      cfg.eps_coeff ? *cfg.eps_coeff
                    : cfg.model.s * std::max(before.eps_A, 1e-12);
  const RecoveryResult res = recover_coeff(inst.Y, Abar, cfg.model.s, eps_coeff);
  const Matching after = match_dictionaries(inst.A, res.Ahat);

  persist_instance(cfg, inst);
  if (!cfg.output_dir.empty()) {
    const fs::path dir(cfg.output_dir);
    write_matrix_csv((dir / "Ahat.csv").string(), res.Ahat.A);
    write_matrix_csv((dir / "Xhat.csv").string(), res.Xhat);
  }
  std::printf("input atoms       %d (eps_A %.6g)\n", Abar.r(), before.eps_A);
  std::printf("eps_coeff_used    %.17g\n", eps_coeff);
  std::printf("eps_A refined     %.6g\n", after.eps_A);
  std::printf("frac_within_eps   %.6g\n", res.frac_within_eps);
  if (!cfg.output_dir.empty())
    std::printf("artifacts         %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_eval(const ConfigFlags& flags, const std::string& est_path) {
  const ExperimentConfig cfg = config_from_kv(flags.collect());
  const Instance inst = make_instance(cfg);
  const double rho = resolve_rho(cfg, inst.stats.mu0_hat);
  const CorrelationGraph G = build_graph(inst.Y, rho);

  const bool persist = !cfg.output_dir.empty();
  if (persist) fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  std::printf("n, edges          %d, %zu\n", G.n, G.edge_count());
  std::printf("rho               %.17g\n", rho);

  try {
    const CorrGraphReport rep = verify_corr_graph(G, inst.Y, cfg.model);
    std::printf("lemma scan        corr1=%lld corr2=%lld over %lld pairs "
                "(rho in interval: %s)\n",
                rep.corr1_violations, rep.corr2_violations, rep.pairs_checked,
                rep.rho_in_interval ? "yes" : "no");
    if (persist) {
      std::ofstream out(dir / "violations.csv", std::ios::binary);
      if (!out) throw Error("cannot open violations.csv for writing");
      out << "# corr1=" << rep.corr1_violations
          << " corr2=" << rep.corr2_violations
          << " pairs_checked=" << rep.pairs_checked
          << " rho_in_interval=" << (rep.rho_in_interval ? 1 : 0) << "\n";
      out << "kind,i,j\n";
      for (const auto& [i, j] : rep.corr1_samples)
        out << "corr1," << i << ',' << j << '\n';
      for (const auto& [i, j] : rep.corr2_samples)
        out << "corr2," << i << ',' << j << '\n';
      if (!out) throw Error("failed writing violations.csv");
    }
  } catch (const RegimeNotApplicable&) {
    std::printf("lemma scan        skipped (separation interval empty)\n");
  }

  try {
    const AgreementReport ar =
        procedure_agreement(inst.Y, G, cfg.agreement_samples, cfg.seed);
    std::printf("agreement         %.6g (tp=%lld fp=%lld tn=%lld fn=%lld "
                "skipped=%d, cube condition: %s)\n",
                ar.agreement, ar.tp, ar.fp, ar.tn, ar.fn, ar.skipped,
                ar.regime_ok ? "yes" : "no");
    if (persist) {
      std::ofstream out(dir / "confusion.csv", std::ios::binary);
      if (!out) throw Error("cannot open confusion.csv for writing");
      out << "tp,fp,tn,fn\n"
          << ar.tp << ',' << ar.fp << ',' << ar.tn << ',' << ar.fn << "\n";
      if (!out) throw Error("failed writing confusion.csv");
    }
  } catch (const EmptySample&) {
    std::printf("agreement         no anchor edges to sample\n");
  }

  if (!est_path.empty()) {
    const Dictionary est{read_matrix_csv(est_path)};
    const Matching m = match_dictionaries(inst.A, est);
    std::printf("estimate atoms    %d\n", est.r());
    std::printf("eps_A             %.6g (mean %.6g, unmatched true: %zu)\n",
                m.eps_A, m.mean_error, m.unmatched_true.size());
    if (persist) {
      std::ofstream out(dir / "matching.csv", std::ios::binary);
      if (!out) throw Error("cannot open matching.csv for writing");
      out << "# eps_A=" << format_double(m.eps_A)
          << " mean_error=" << format_double(m.mean_error)
          << " unmatched_true=" << m.unmatched_true.size() << "\n";
      out << "est_index,true_index,sign,error\n";
      for (std::size_t j = 0; j < m.permutation.size(); ++j) {
        out << j << ',' << m.permutation[j] << ',' << m.signs[j] << ',';
        if (m.permutation[j] >= 0) out << format_double(m.per_atom_error[j]);
        out << '\n';
      }
      if (!out) throw Error("failed writing matching.csv");
    }
  }
  if (persist) std::printf("artifacts         %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_run(const ConfigFlags& flags) {
  const ExperimentConfig cfg = config_from_kv(flags.collect());
  const ReportRow row = run_experiment(cfg);
  print_row(row);

  bool failed = row.status != "ok";
  // In-regime lemma violations are a hard failure even when every stage ran.
  if (!failed && row.rho_in_interval == 1 &&
      (row.corr1_violations > 0 || row.corr2_violations > 0))
    failed = true;
  if (failed) std::printf("gate              FAILED\n");
  return failed ? 3 : 0;
}

int cmd_sweep(const ConfigFlags& flags) {
  const KvList kv = flags.collect();
  std::string out_dir;
  for (const auto& [key, value] : kv)
    if (key == "out") out_dir = value;
  if (out_dir.empty())
    throw ConfigError("sweep requires an output directory (out= or --out)");

  const std::vector<ExperimentConfig> grid = expand_grid(kv);
  const std::vector<ReportRow> rows = sweep(grid, out_dir);

  int ok = 0;
  for (const ReportRow& row : rows)
    if (row.status == "ok") ++ok;
  std::printf("configs           %zu\n", grid.size());
  std::printf("ok rows           %d\n", ok);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].status != "ok")
      std::printf("run_%04d          %s\n", static_cast<int>(i),
                  rows[i].status.c_str());
  std::printf("table             %s/sweep.csv\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage recovery of overcomplete dictionaries from "
               "sparse-coded samples"};
  app.require_subcommand(1);

  ConfigFlags f_gen, f_graph, f_cluster, f_recover, f_eval, f_run, f_sweep;
  std::string abar_path, est_path;

  CLI::App* gen = app.add_subcommand(
      "gen", "synthesize an instance (dictionary, coefficients, samples)");
  f_gen.attach(gen);
  CLI::App* graph = app.add_subcommand(
      "graph", "build the sample correlation graph at the threshold");
  f_graph.attach(graph);
  CLI::App* cluster = app.add_subcommand(
      "cluster", "first stage: anchor clustering and spectral estimates");
  f_cluster.attach(cluster);
  CLI::App* recover = app.add_subcommand(
      "recover", "second stage: sparse coding and dictionary refinement");
  f_recover.attach(recover);
  recover->add_option("--abar", abar_path,
                      "dictionary estimate CSV to refine (default: the "
                      "generating dictionary)");
  CLI::App* eval = app.add_subcommand(
      "eval", "ground-truth checks: lemma scan, verdict agreement, matching");
  f_eval.attach(eval);
  eval->add_option("--est", est_path,
                   "estimated dictionary CSV to match against the truth");
  CLI::App* run = app.add_subcommand(
      "run", "full pipeline with report row and hard gates");
  f_run.attach(run);
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "expand comma lists into a grid and run every config");
  f_sweep.attach(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen(f_gen);
    if (*graph) return cmd_graph(f_graph);
    if (*cluster) return cmd_cluster(f_cluster);
    if (*recover) return cmd_recover(f_recover, abar_path);
    if (*eval) return cmd_eval(f_eval, est_path);
    if (*run) return cmd_run(f_run);
    if (*sweep_cmd) return cmd_sweep(f_sweep);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
