// lc_arena: generate meta-datasets, meta-train agents, evaluate and compare.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lcarena/cli.hpp"
#include "lcarena/error.hpp"

namespace {

using lcarena::RunConfig;

struct RunFlags {
  std::string config;
  std::string manifest;
  std::string agent;
  std::string out;
  std::string checkpoint;
  std::string reveal;
  std::string ablation;
  double sigma = 0.0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t train_seed = 0;
  int workers = 0;
  int internal_runs = -1;
  int episodes = -1;
  bool final_phase = false;
  bool split = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run config (flags override its values)");
  cmd->add_option("--manifest", f.manifest, "meta-dataset manifest.json");
  cmd->add_option("--agent", f.agent, "ddqn | freeze_thaw | avg_rank | bos | rand_search");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--checkpoint", f.checkpoint, "checkpoint path (default: <out>/checkpoint_<agent>.json)");
  cmd->add_option("--sigma", f.sigma, "reward time-scale sigma (default: budget / 10)");
  cmd->add_option("--seeds", f.seeds, "evaluation seeds")->delimiter(',');
  cmd->add_option("--train-seed", f.train_seed, "meta-training seed (default: LC_ARENA_SEED or 0)");
  cmd->add_option("--reveal", f.reveal, "full_curve | last_point_only");
  cmd->add_option("--workers", f.workers, "parallel episodes");
  cmd->add_option("--internal-runs", f.internal_runs, "episodes averaged per (dataset, seed)");
  cmd->add_option("--episodes", f.episodes, "ddqn meta-training episodes");
  cmd->add_flag("--feedback-final-split", f.split, "halve meta-test into feedback and final sets");
  cmd->add_flag("--final", f.final_phase, "evaluate on the final half of the split");
}

RunConfig resolve(const RunFlags& f, CLI::App* cmd) {
  RunConfig c = f.config.empty() ? RunConfig{} : lcarena::load_run_config(f.config);
  if (auto s = lcarena::env_seed(); s && f.config.empty()) c.train_seed = *s;
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.agent.empty()) c.agent.name = f.agent;
  if (!f.out.empty()) c.out = f.out;
  if (!f.checkpoint.empty()) c.checkpoint = f.checkpoint;
  if (cmd->count("--sigma")) c.sigma = f.sigma;
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (cmd->count("--train-seed")) c.train_seed = f.train_seed;
  if (!f.reveal.empty()) c.reveal = lcarena::reveal_mode_from_string(f.reveal);
  if (!f.ablation.empty()) c.ablation = f.ablation;
  if (cmd->count("--workers")) c.workers = f.workers;
  if (cmd->count("--internal-runs")) c.internal_runs = f.internal_runs;
  if (cmd->count("--episodes")) c.agent.ddqn.train_episodes = f.episodes;
  if (f.split) c.feedback_final_split = true;
  if (f.final_phase) c.final_phase = true;
  if (!lcarena::is_known_agent(c.agent.name))
    throw lcarena::Error("unknown_agent", "unknown agent '" + c.agent.name + "'");
  if (c.sigma && !(*c.sigma > 0.0)) throw lcarena::Error("invalid_config", "sigma must be positive");
  if (c.manifest.empty()) throw lcarena::Error("invalid_config", "--manifest is required");
  return c;
}

std::string one_line(std::string s) {
  for (auto& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-limited algorithm selection arena"};
  app.require_subcommand(1);

  lcarena::GenSpec gen;
  std::string gen_out = "data";
  std::string gen_kind = "time_indexed";
  std::string gen_scenario = "generic";
  auto* generate = app.add_subcommand("generate", "write a synthetic meta-dataset");
  generate->add_option("--datasets", gen.n_datasets, "number of datasets")->capture_default_str();
  generate->add_option("--algorithms", gen.n_algorithms, "number of algorithms")->capture_default_str();
  generate->add_option("--seed", gen.seed, "generator seed (default: LC_ARENA_SEED or 0)");
  generate->add_option("--curve-kind", gen_kind, "time_indexed | size_indexed")->capture_default_str();
  generate->add_option("--anchors", gen.anchors_per_curve, "anchors per curve")->capture_default_str();
  generate->add_option("--budget", gen.total_budget, "total budget per dataset")->capture_default_str();
  generate->add_option("--scenario", gen_scenario, "generic | non_crossing | frequent_crossing")
      ->capture_default_str();
  generate->add_option("--noise", gen.noise_sd, "per-anchor noise sd")->capture_default_str();
  generate->add_option("--meta-train-fraction", gen.meta_train_fraction, "share of meta-train datasets")
      ->capture_default_str();
  generate->add_option("--out", gen_out, "output directory")->capture_default_str();

  RunFlags train_flags, eval_flags, ablate_flags;
  auto* train = app.add_subcommand("train", "meta-train an agent and write its checkpoint");
  add_run_flags(train, train_flags);
  auto* evaluate = app.add_subcommand("evaluate", "run meta-test episodes and write reports");
  add_run_flags(evaluate, eval_flags);
  auto* ablate = app.add_subcommand("ablate", "paired ddqn ablation");
  add_run_flags(ablate, ablate_flags);
  ablate->add_option("--kind", ablate_flags.ablation, "no_meta_train | last_point_only");

  std::vector<std::string> report_paths;
  std::string report_out = "comparison";
  auto* report = app.add_subcommand("report", "compare report.csv files");
  report->add_option("reports", report_paths, "report.csv files or report directories")->required();
  report->add_option("--out", report_out, "output directory")->capture_default_str();

  std::string traj_path, traj_manifest;
  auto* inspect = app.add_subcommand("inspect-trajectory", "summarize algorithm transitions of a trajectory");
  inspect->add_option("trajectory", traj_path, "trajectory .jsonl")->required();
  inspect->add_option("--manifest", traj_manifest, "manifest for algorithm families");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      if (!generate->count("--seed"))
        if (auto s = lcarena::env_seed()) gen.seed = *s;
      gen.curve_kind = lcarena::curve_kind_from_string(gen_kind);
      gen.scenario = lcarena::scenario_from_string(gen_scenario);
      std::cout << lcarena::cmd_generate(gen, gen_out).string() << '\n';
    } else if (train->parsed()) {
      std::cout << lcarena::cmd_train(resolve(train_flags, train)).string() << '\n';
    } else if (evaluate->parsed()) {
      const auto c = resolve(eval_flags, evaluate);
      lcarena::cmd_evaluate(c);
      std::cout << (c.out / "report.csv").string() << '\n';
    } else if (ablate->parsed()) {
      auto c = resolve(ablate_flags, ablate);
      if (ablate_flags.agent.empty() && ablate_flags.config.empty()) c.agent.name = "ddqn";
      lcarena::cmd_ablate(c);
      std::cout << (c.out / "ablation.json").string() << '\n';
    } else if (report->parsed()) {
      std::vector<std::filesystem::path> paths(report_paths.begin(), report_paths.end());
      lcarena::cmd_report(paths, report_out);
      std::cout << (std::filesystem::path(report_out) / "comparison.csv").string() << '\n';
    } else if (inspect->parsed()) {
      std::optional<std::filesystem::path> manifest;
      if (!traj_manifest.empty()) manifest = traj_manifest;
      std::cout << lcarena::cmd_inspect_trajectory(traj_path, manifest).dump(2) << '\n';
    }
  } catch (const lcarena::Error& e) {
    std::cerr << "error: " << e.code() << ": " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 3;
  }
  return 0;
}
