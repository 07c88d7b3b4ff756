#pragma once

// Meta-training / meta-testing orchestration, scoring and reporting.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcarena/agent.hpp"
#include "lcarena/ddqn.hpp"
#include "lcarena/environment.hpp"

namespace lcarena {

struct EpisodeConfig {
  RewardConfig reward;
  RevealMode reveal = RevealMode::full_curve;
};

struct StepRecord {
  int t = 0;
  Action action;
  double charged = 0.0;
  double t_tilde = 0.0;
  double reward = 0.0;
  double revealed_train = 0.0;
  double revealed_valid = 0.0;
  /// Test performance of the predicted best after the step (scoring only).
  double best_test = 0.0;
};

struct EpisodeTrajectory {
  std::string agent;
  int dataset = 0;
  std::uint64_t seed = 0;
  int run = 0;
  double baseline = 0.0;
  std::vector<StepRecord> steps;
  double alc = 0.0;
  double fixed_time = 0.0;
};

/// Plays one full episode. Trajectory seeds are passed to agent.reset().
EpisodeTrajectory run_episode(Agent& agent, const MetaDataset& md, int dataset, const EpisodeConfig& cfg,
                              std::uint64_t seed, int run = 0);

struct ReportEntry {
  std::string agent;
  int dataset = 0;
  std::uint64_t seed = 0;
  double alc = 0.0;
  double fixed_time = 0.0;
};

struct AgentAggregate {
  std::string agent;
  std::vector<std::uint64_t> seeds;
  std::vector<double> seed_mean_alc;    // mean over datasets, per seed
  std::vector<double> seed_mean_fixed;  // same for the fixed-time score
  std::uint64_t worst_seed = 0;         // seed with the lowest mean ALC
  double worst_seed_mean_alc = 0.0;
  double worst_seed_mean_fixed = 0.0;   // fixed-time mean for the worst fixed-time seed
  double std_alc = 0.0;                 // across datasets, worst seed
  double std_fixed = 0.0;
  std::size_t n_datasets = 0;
};

/// Groups entries by agent (sorted by name) and recomputes every aggregate.
std::vector<AgentAggregate> aggregate(std::span<const ReportEntry> entries);

struct RunReport {
  std::string agent;
  bool meta_trained = false;
  std::vector<ReportEntry> entries;
  std::vector<EpisodeTrajectory> trajectories;
};

struct HarnessConfig {
  EpisodeConfig episode;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  /// Episodes averaged per (dataset, seed); 0 picks the agent default.
  int internal_runs = 0;
  int workers = 1;
  /// Halve meta-test into feedback and final sets; final only on request.
  bool feedback_final_split = false;
  bool final_phase = false;
};

/// Meta-test datasets honouring the feedback/final split.
std::vector<int> evaluation_datasets(const MetaDataset& md, const HarnessConfig& cfg);

/// One episode per (meta-test dataset, seed, internal run). Agents are
/// cloned per episode, so `agent` itself is never mutated.
RunReport run_meta_test(const Agent& agent, const MetaDataset& md, const HarnessConfig& cfg);

struct MetaTrainResult {
  bool meta_trained = false;
  std::vector<double> losses;
  nlohmann::json checkpoint;
};

/// Meta-trains on the meta-train split only. Agents without a learning phase
/// are left untouched and flagged.
MetaTrainResult run_meta_train(Agent& agent, const MetaDataset& md, const EpisodeConfig& cfg);

enum class AblationKind { no_meta_train, last_point_only };
std::string_view to_string(AblationKind kind);
AblationKind ablation_kind_from_string(std::string_view s);

struct EpisodeKey {
  int dataset = 0;
  std::uint64_t seed = 0;
  int run = 0;
  friend bool operator==(const EpisodeKey&, const EpisodeKey&) = default;
};

struct AblationResult {
  RunReport full;
  RunReport ablated;
};

std::vector<EpisodeKey> episode_schedule(const RunReport& report);

/// For every seed: a DDQN seeded with it is meta-trained (or not) and
/// evaluated on meta-test in the matching environment. The full and ablated
/// arms share seeds and episode order.
AblationResult run_ablation(AblationKind kind, const DdqnConfig& ddqn, const MetaDataset& md,
                            const HarnessConfig& cfg);

struct AlgorithmSwitch {
  int step = 0;
  int from = 0;
  int to = 0;
  friend bool operator==(const AlgorithmSwitch&, const AlgorithmSwitch&) = default;
};

struct TrajectorySummary {
  std::vector<AlgorithmSwitch> transitions;
  std::map<std::string, int> family_occupancy;
  int switch_count = 0;
};

/// Changes of the trained algorithm between consecutive steps. Families come
/// from `algorithms` when given, otherwise "a<id>".
TrajectorySummary analyze_trajectory(const EpisodeTrajectory& trajectory,
                                     std::span<const AlgorithmSpec> algorithms = {});

struct ComparisonRow {
  AgentAggregate aggregate;
  double mean_alc = 0.0;  // over every entry
  double mean_fixed = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<int> datasets;
  /// wins[a][b]: datasets where a's seed-averaged ALC is strictly above b's.
  std::map<std::string, std::map<std::string, int>> wins;
};

/// Throws Error("inconsistent_reports") when agents cover different datasets.
ComparisonTable compare_reports(std::span<const ReportEntry> entries);

// Files -------------------------------------------------------------------

nlohmann::json trajectory_step_json(const StepRecord& s);
nlohmann::json to_json(const AgentAggregate& a);
nlohmann::json to_json(const ComparisonTable& t);

/// report.csv, report.json, trajectories/*.jsonl and plots/*.csv under `dir`.
void write_run_report(const RunReport& report, const std::filesystem::path& dir);
std::vector<ReportEntry> read_report_csv(const std::filesystem::path& path);
EpisodeTrajectory read_trajectory_jsonl(const std::filesystem::path& path);
/// comparison.csv and comparison.json under `dir`.
void write_comparison(const ComparisonTable& table, const std::filesystem::path& dir);

}  // namespace lcarena
