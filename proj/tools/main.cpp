// fracdens CLI: Monte Carlo density estimation for additive-fractional-noise
// SDEs and the experiment harness around it.

#include <CLI11.hpp>
#include <iostream>

#include "fracdens/commands.hpp"

using fracdens::RunConfig;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  long seed = -1;
  long workers = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "flat key=value config file");
  cmd->add_option("--set", opts.overrides, "override a config key (key=value, repeatable)");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--workers", opts.workers, "worker threads (results are worker-count independent)");
  cmd->add_option("--out", opts.out, "output directory");
}

RunConfig assemble(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = RunConfig::from_file(opts.config_path);
  for (const auto& kv : opts.overrides) cfg.parse_line(kv);
  if (opts.seed >= 0) cfg.set("seed", std::to_string(opts.seed));
  if (opts.workers >= 0) cfg.set("workers", std::to_string(opts.workers));
  if (!opts.out.empty()) cfg.set("out", opts.out);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracdens: density estimation for SDEs driven by fractional noise"};
  app.require_subcommand(1);

  CommonOpts o_sim, o_dens, o_trans, o_stat, o_sweep, o_val, o_avg;
  std::string experiment;

  auto* sim = app.add_subcommand("simulate", "emit noise / SDE paths as CSV");
  add_common(sim, o_sim);
  auto* dens = app.add_subcommand("density", "conditional density at a y-list");
  add_common(dens, o_dens);
  auto* trans = app.add_subcommand("transition", "transition density p_t(y0; y)");
  add_common(trans, o_trans);
  auto* stat = app.add_subcommand("stationary", "stationary density estimate");
  add_common(stat, o_stat);
  auto* sweep = app.add_subcommand("sweep", "parametric stationary sweep with finite differences");
  add_common(sweep, o_sweep);
  auto* val = app.add_subcommand("validate", "run a named experiment");
  val->add_option("experiment", experiment, "experiment name")->required();
  add_common(val, o_val);
  auto* avg = app.add_subcommand("averaging", "slow-fast averaging experiment");
  add_common(avg, o_avg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return fracdens::cmd_simulate(assemble(o_sim));
    if (dens->parsed()) return fracdens::cmd_density(assemble(o_dens));
    if (trans->parsed()) return fracdens::cmd_transition(assemble(o_trans));
    if (stat->parsed()) return fracdens::cmd_stationary(assemble(o_stat));
    if (sweep->parsed()) return fracdens::cmd_sweep(assemble(o_sweep));
    if (val->parsed()) return fracdens::cmd_validate(experiment, assemble(o_val));
    if (avg->parsed()) return fracdens::cmd_averaging(assemble(o_avg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
