#pragma once

// Agent abstraction shared by all selection policies.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcarena/curve_store.hpp"
#include "lcarena/environment.hpp"

namespace lcarena {

/// How meta-training episodes are simulated.
struct MetaTrainContext {
  RewardConfig reward;
  RevealMode reveal = RevealMode::full_curve;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;

  /// True when act() is meaningless before meta_train() or a checkpoint load.
  virtual bool requires_meta_train() const { return false; }
  virtual bool ready() const { return true; }

  /// Learn from the full train/valid/test curves of `datasets`. No-op by
  /// default.
  virtual void meta_train(const MetaDataset& md, std::span<const int> datasets,
                          const MetaTrainContext& ctx) {
    (void)md;
    (void)datasets;
    (void)ctx;
  }

  /// Start an episode. `initial` is the observation returned by reset().
  virtual void reset(const Observation& initial, std::uint64_t seed) = 0;
  virtual Action act(const Observation& obs) = 0;

  virtual std::unique_ptr<Agent> clone() const = 0;

  /// Learned state; null for agents without one.
  virtual nlohmann::json checkpoint() const { return nullptr; }
  virtual void load_checkpoint(const nlohmann::json& j) { (void)j; }

  /// Per-update training losses recorded by the last meta_train().
  virtual std::vector<double> training_losses() const { return {}; }
};

/// argmax_j of the most recent revealed valid score, over algorithms with at
/// least one revealed point; lowest index wins ties, 0 when nothing is
/// revealed yet.
int predicted_best(const Observation& obs);

}  // namespace lcarena
