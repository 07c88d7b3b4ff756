#pragma once

// Command implementations behind the lc_arena executable.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcarena/agent_factory.hpp"
#include "lcarena/synth.hpp"

namespace lcarena {

inline constexpr const char* kRunConfigSchema = "lc-arena/run-config/1";

struct RunConfig {
  std::filesystem::path manifest;
  AgentConfig agent;
  std::optional<double> sigma;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  /// Seeds meta-training (and untrained initializations).
  std::uint64_t train_seed = 0;
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> checkpoint;
  RevealMode reveal = RevealMode::full_curve;
  bool feedback_final_split = false;
  bool final_phase = false;
  std::string ablation = "no_meta_train";
  int workers = 1;
  int internal_runs = 0;
};

/// Parses a config document. Requires `"schema": "lc-arena/run-config/1"`;
/// unknown top-level keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

/// Seed fallback from LC_ARENA_SEED, if set and numeric.
std::optional<std::uint64_t> env_seed();

std::filesystem::path default_checkpoint_path(const RunConfig& c);

/// Writes out/manifest.json and out/curves/.
std::filesystem::path cmd_generate(const GenSpec& spec, const std::filesystem::path& out);
/// Meta-trains and writes checkpoint_<agent>.json and train_<agent>.json.
std::filesystem::path cmd_train(const RunConfig& c);
void cmd_evaluate(const RunConfig& c);
/// Writes full/ and ablated/ report trees plus ablation.json.
void cmd_ablate(const RunConfig& c);
void cmd_report(const std::vector<std::filesystem::path>& reports, const std::filesystem::path& out);
nlohmann::json cmd_inspect_trajectory(const std::filesystem::path& trajectory,
                                      const std::optional<std::filesystem::path>& manifest);

}  // namespace lcarena
