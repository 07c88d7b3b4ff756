#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "lcarena/agent.hpp"
#include "lcarena/baselines.hpp"
#include "lcarena/ddqn.hpp"
#include "lcarena/freeze_thaw.hpp"

namespace lcarena {

inline constexpr const char* kAgentNames[] = {"ddqn", "freeze_thaw", "avg_rank", "bos", "rand_search"};

bool is_known_agent(const std::string& name);

/// Parameters of every agent; only the block matching `name` is used.
struct AgentConfig {
  std::string name = "rand_search";
  RandSearchConfig rand_search;
  BosConfig bos;
  FreezeThawConfig freeze_thaw;
  DdqnConfig ddqn;
};

/// Reads the optional per-agent blocks ("rand_search", "bos", ...) of a
/// config object; unknown keys inside a block are rejected.
void apply_agent_params(AgentConfig& config, const nlohmann::json& agent_params);
nlohmann::json agent_params_to_json(const AgentConfig& config);

/// Throws Error("unknown_agent") for unrecognized names.
std::unique_ptr<Agent> make_agent(const AgentConfig& config);

/// Episodes averaged per (dataset, seed) report entry: 5 for rand_search,
/// 1 for everything else.
int default_internal_runs(const std::string& agent_name);

}  // namespace lcarena
