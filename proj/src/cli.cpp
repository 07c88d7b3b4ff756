#include "lcarena/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "lcarena/error.hpp"
#include "lcarena/harness.hpp"

namespace lcarena {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path, const std::string& code) {
  std::ifstream in(path);
  if (!in) throw Error(code, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(code, path.string() + " is not valid JSON: " + e.what());
  }
}

HarnessConfig harness_config(const RunConfig& c) {
  HarnessConfig h;
  h.episode.reward.sigma = c.sigma;
  h.episode.reveal = c.reveal;
  h.seeds = c.seeds;
  h.internal_runs = c.internal_runs;
  h.workers = c.workers;
  h.feedback_final_split = c.feedback_final_split;
  h.final_phase = c.final_phase;
  return h;
}

AgentConfig seeded_agent(const RunConfig& c) {
  AgentConfig a = c.agent;
  a.ddqn.seed = c.train_seed;
  return a;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw Error("invalid_config", "config must be a JSON object");
  if (j.value("schema", "") != kRunConfigSchema)
    throw Error("invalid_config", std::string("config needs \"schema\": \"") + kRunConfigSchema + "\"");
  static const std::set<std::string> known = {
      "schema", "manifest", "agent", "agent_params", "sigma", "seeds", "train_seed", "out", "checkpoint",
      "reveal", "feedback_final_split", "final", "ablation", "workers", "internal_runs"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw Error("invalid_config", "unknown config key '" + k + "'");

  RunConfig c;
  try {
    if (j.contains("manifest")) c.manifest = j.at("manifest").get<std::string>();
    if (j.contains("agent")) c.agent.name = j.at("agent").get<std::string>();
    if (j.contains("agent_params")) apply_agent_params(c.agent, j.at("agent_params"));
    if (j.contains("sigma") && !j.at("sigma").is_null()) c.sigma = j.at("sigma").get<double>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("train_seed")) c.train_seed = j.at("train_seed").get<std::uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("checkpoint") && !j.at("checkpoint").is_null())
      c.checkpoint = fs::path(j.at("checkpoint").get<std::string>());
    if (j.contains("reveal")) c.reveal = reveal_mode_from_string(j.at("reveal").get<std::string>());
    if (j.contains("feedback_final_split")) c.feedback_final_split = j.at("feedback_final_split").get<bool>();
    if (j.contains("final")) c.final_phase = j.at("final").get<bool>();
    if (j.contains("ablation")) c.ablation = j.at("ablation").get<std::string>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("internal_runs")) c.internal_runs = j.at("internal_runs").get<int>();
  } catch (const json::exception& e) {
    throw Error("invalid_config", std::string("bad config value: ") + e.what());
  }
  if (!is_known_agent(c.agent.name)) throw Error("unknown_agent", "unknown agent '" + c.agent.name + "'");
  if (c.sigma && !(*c.sigma > 0.0)) throw Error("invalid_config", "sigma must be positive");
  return c;
}

json to_json(const RunConfig& c) {
  return {{"schema", kRunConfigSchema},
          {"manifest", c.manifest.string()},
          {"agent", c.agent.name},
          {"agent_params", agent_params_to_json(c.agent)},
          {"sigma", c.sigma ? json(*c.sigma) : json()},
          {"seeds", c.seeds},
          {"train_seed", c.train_seed},
          {"out", c.out.string()},
          {"checkpoint", c.checkpoint ? json(c.checkpoint->string()) : json()},
          {"reveal", std::string(to_string(c.reveal))},
          {"feedback_final_split", c.feedback_final_split},
          {"final", c.final_phase},
          {"ablation", c.ablation},
          {"workers", c.workers},
          {"internal_runs", c.internal_runs}};
}

RunConfig load_run_config(const fs::path& path) { return run_config_from_json(read_json(path, "unreadable_config")); }

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("LC_ARENA_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(v, &used);
    if (used != std::string(v).size()) return std::nullopt;
    return seed;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

fs::path default_checkpoint_path(const RunConfig& c) {
  return c.checkpoint.value_or(c.out / ("checkpoint_" + c.agent.name + ".json"));
}

fs::path cmd_generate(const GenSpec& spec, const fs::path& out) {
  const MetaDataset md = generate(spec);
  fs::create_directories(out);
  const fs::path manifest = out / "manifest.json";
  save_metadataset(md, manifest);
  return manifest;
}

fs::path cmd_train(const RunConfig& c) {
  const MetaDataset md = load_metadataset(c.manifest);
  auto agent = make_agent(seeded_agent(c));
  const auto h = harness_config(c);
  const MetaTrainResult result = run_meta_train(*agent, md, h.episode);

  const fs::path checkpoint = default_checkpoint_path(c);
  write_json(checkpoint, {{"agent", c.agent.name}, {"meta_trained", result.meta_trained}, {"state", result.checkpoint}});
  json summary = {{"agent", c.agent.name},
                  {"meta_trained", result.meta_trained},
                  {"meta_train_datasets", md.split().meta_train},
                  {"losses", result.losses}};
  if (!result.meta_trained) summary["note"] = "no meta-training";
  write_json(c.out / ("train_" + c.agent.name + ".json"), summary);
  return checkpoint;
}

void cmd_evaluate(const RunConfig& c) {
  const MetaDataset md = load_metadataset(c.manifest);
  auto agent = make_agent(seeded_agent(c));
  if (agent->requires_meta_train()) {
    const fs::path checkpoint = default_checkpoint_path(c);
    if (!fs::exists(checkpoint)) {
      const std::string what = c.agent.name == "avg_rank" ? "average ranking" : "trained network";
      throw Error("missing_checkpoint", c.agent.name + " needs its " + what + " from `train`; not found at " +
                                            checkpoint.string());
    }
    const json j = read_json(checkpoint, "malformed_checkpoint");
    if (j.value("agent", "") != c.agent.name)
      throw Error("malformed_checkpoint", checkpoint.string() + " was not written for " + c.agent.name);
    agent->load_checkpoint(j.at("state"));
  }
  const RunReport report = run_meta_test(*agent, md, harness_config(c));
  write_run_report(report, c.out);
}

void cmd_ablate(const RunConfig& c) {
  const MetaDataset md = load_metadataset(c.manifest);
  if (c.agent.name != "ddqn") throw Error("invalid_config", "ablations are defined for the ddqn agent");
  const AblationKind kind = ablation_kind_from_string(c.ablation);
  const auto result = run_ablation(kind, c.agent.ddqn, md, harness_config(c));
  write_run_report(result.full, c.out / "full");
  write_run_report(result.ablated, c.out / "ablated");

  std::vector<ReportEntry> both = result.full.entries;
  both.insert(both.end(), result.ablated.entries.begin(), result.ablated.entries.end());
  double full_sum = 0.0, ablated_sum = 0.0;
  for (const auto& e : result.full.entries) full_sum += e.alc;
  for (const auto& e : result.ablated.entries) ablated_sum += e.alc;
  const auto n = static_cast<double>(result.full.entries.size());
  write_json(c.out / "ablation.json",
             {{"kind", std::string(to_string(kind))},
              {"full_mean_alc", full_sum / n},
              {"ablated_mean_alc", ablated_sum / n},
              {"paired_mean_margin", (full_sum - ablated_sum) / n},
              {"comparison", to_json(compare_reports(both))}});
}

void cmd_report(const std::vector<fs::path>& reports, const fs::path& out) {
  if (reports.empty()) throw Error("invalid_config", "report needs at least one report.csv");
  std::vector<ReportEntry> entries;
  for (const auto& p : reports) {
    const fs::path csv = fs::is_directory(p) ? p / "report.csv" : p;
    auto part = read_report_csv(csv);
    entries.insert(entries.end(), part.begin(), part.end());
  }
  write_comparison(compare_reports(entries), out);
}

json cmd_inspect_trajectory(const fs::path& trajectory, const std::optional<fs::path>& manifest) {
  const EpisodeTrajectory t = read_trajectory_jsonl(trajectory);
  std::vector<AlgorithmSpec> algorithms;
  if (manifest) {
    const MetaDataset md = load_metadataset(*manifest);
    algorithms.assign(md.algorithms().begin(), md.algorithms().end());
  }
  const auto s = analyze_trajectory(t, algorithms);
  json transitions = json::array();
  for (const auto& tr : s.transitions) transitions.push_back({{"step", tr.step}, {"from", tr.from}, {"to", tr.to}});
  return {{"agent", t.agent},
          {"dataset", t.dataset},
          {"seed", t.seed},
          {"run", t.run},
          {"steps", t.steps.size()},
          {"alc", t.alc},
          {"fixed_time", t.fixed_time},
          {"switch_count", s.switch_count},
          {"transitions", transitions},
          {"family_occupancy", s.family_occupancy}};
}

}  // namespace lcarena
