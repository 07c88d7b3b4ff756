#include "lcarena/agent_factory.hpp"

#include <algorithm>
#include <set>

#include "lcarena/error.hpp"

namespace lcarena {

using nlohmann::json;

namespace {

// Copies `key` from `block` into `out` when present; records the key as used.
template <typename T>
void read(const json& block, const char* key, T& out, std::set<std::string>& used) {
  used.insert(key);
  if (!block.contains(key)) return;
  try {
    out = block.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error("invalid_config", std::string("bad value for '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& block, const std::set<std::string>& used, const std::string& where) {
  for (const auto& [k, v] : block.items())
    if (!used.count(k)) throw Error("invalid_config", "unknown key '" + k + "' in " + where);
}

}  // namespace

bool is_known_agent(const std::string& name) {
  return std::find(std::begin(kAgentNames), std::end(kAgentNames), name) != std::end(kAgentNames);
}

void apply_agent_params(AgentConfig& c, const json& p) {
  if (p.is_null()) return;
  if (!p.is_object()) throw Error("invalid_config", "agent parameters must be an object");
  for (const auto& [k, v] : p.items())
    if (!is_known_agent(k)) throw Error("invalid_config", "unknown agent parameter block '" + k + "'");

  if (p.contains("rand_search")) {
    const auto& b = p.at("rand_search");
    std::set<std::string> used;
    read(b, "delta_min_fraction", c.rand_search.delta_min_fraction, used);
    read(b, "delta_max_fraction", c.rand_search.delta_max_fraction, used);
    reject_unknown(b, used, "rand_search");
  }
  if (p.contains("bos")) {
    const auto& b = p.at("bos");
    std::set<std::string> used;
    read(b, "alpha_fraction", c.bos.alpha_fraction, used);
    used.insert("alpha");
    if (b.contains("alpha") && !b.at("alpha").is_null()) c.bos.alpha = b.at("alpha").get<double>();
    reject_unknown(b, used, "bos");
  }
  if (p.contains("freeze_thaw")) {
    const auto& b = p.at("freeze_thaw");
    std::set<std::string> used;
    read(b, "delta_fraction", c.freeze_thaw.delta_fraction, used);
    read(b, "prior_variance", c.freeze_thaw.prior_variance, used);
    read(b, "mc_samples", c.freeze_thaw.mc_samples, used);
    read(b, "quantiles", c.freeze_thaw.quantiles, used);
    read(b, "tie_tolerance", c.freeze_thaw.tie_tolerance, used);
    reject_unknown(b, used, "freeze_thaw");
  }
  if (p.contains("ddqn")) {
    const auto& b = p.at("ddqn");
    std::set<std::string> used;
    auto& d = c.ddqn;
    read(b, "hidden", d.hidden, used);
    read(b, "gamma", d.gamma, used);
    read(b, "replay_capacity", d.replay_capacity, used);
    read(b, "batch_size", d.batch_size, used);
    read(b, "target_sync_interval", d.target_sync_interval, used);
    read(b, "train_episodes", d.train_episodes, used);
    read(b, "epsilon_start", d.epsilon_start, used);
    read(b, "epsilon_end", d.epsilon_end, used);
    read(b, "epsilon_decay_fraction", d.epsilon_decay_fraction, used);
    read(b, "eval_epsilon", d.eval_epsilon, used);
    read(b, "initial_budget_fraction", d.initial_budget_fraction, used);
    read(b, "learning_rate", d.learning_rate, used);
    reject_unknown(b, used, "ddqn");
  }
}

json agent_params_to_json(const AgentConfig& c) {
  const auto& d = c.ddqn;
  return {
      {"rand_search",
       {{"delta_min_fraction", c.rand_search.delta_min_fraction},
        {"delta_max_fraction", c.rand_search.delta_max_fraction}}},
      {"bos", {{"alpha_fraction", c.bos.alpha_fraction}, {"alpha", c.bos.alpha ? json(*c.bos.alpha) : json()}}},
      {"freeze_thaw",
       {{"delta_fraction", c.freeze_thaw.delta_fraction},
        {"prior_variance", c.freeze_thaw.prior_variance},
        {"mc_samples", c.freeze_thaw.mc_samples},
        {"quantiles", c.freeze_thaw.quantiles},
        {"tie_tolerance", c.freeze_thaw.tie_tolerance}}},
      {"ddqn",
       {{"hidden", d.hidden},
        {"gamma", d.gamma},
        {"replay_capacity", d.replay_capacity},
        {"batch_size", d.batch_size},
        {"target_sync_interval", d.target_sync_interval},
        {"train_episodes", d.train_episodes},
        {"epsilon_start", d.epsilon_start},
        {"epsilon_end", d.epsilon_end},
        {"epsilon_decay_fraction", d.epsilon_decay_fraction},
        {"eval_epsilon", d.eval_epsilon},
        {"initial_budget_fraction", d.initial_budget_fraction},
        {"learning_rate", d.learning_rate}}},
  };
}

std::unique_ptr<Agent> make_agent(const AgentConfig& c) {
  if (c.name == "rand_search") return std::make_unique<RandSearchAgent>(c.rand_search);
  if (c.name == "bos") return std::make_unique<BosAgent>(c.bos);
  if (c.name == "avg_rank") return std::make_unique<AvgRankAgent>();
  if (c.name == "freeze_thaw") return std::make_unique<FreezeThawAgent>(c.freeze_thaw);
  if (c.name == "ddqn") return std::make_unique<DdqnAgent>(c.ddqn);
  throw Error("unknown_agent", "unknown agent '" + c.name + "'");
}

int default_internal_runs(const std::string& agent_name) { return agent_name == "rand_search" ? 5 : 1; }

}  // namespace lcarena
