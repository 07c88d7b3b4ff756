#pragma once

// Double deep Q-network baseline. The network only picks which algorithm to
// train; the increment follows a doubling schedule and the predicted best is
// the current valid-score leader.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lcarena/agent.hpp"
#include "lcarena/rng.hpp"
#include "lcarena/value_net.hpp"

namespace lcarena {

struct DdqnConfig {
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  std::size_t replay_capacity = 10000;
  std::size_t batch_size = 32;
  int target_sync_interval = 100;
  int train_episodes = 300;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Fraction of training episodes over which epsilon decays linearly.
  double epsilon_decay_fraction = 0.5;
  double eval_epsilon = 0.0;
  /// First increment for an untouched algorithm, as a fraction of the budget.
  double initial_budget_fraction = 0.01;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  /// Allow act() with freshly initialized weights (no meta-training).
  bool allow_untrained = false;
};

void validate(const DdqnConfig& config);

/// Per algorithm: (last valid, best valid, spent / T, trained flag), then
/// (t_tilde, remaining / T). Length 4 * |algorithms| + 2.
Eigen::VectorXd ddqn_encode(const Observation& obs);

inline std::size_t ddqn_state_size(std::size_t n_algorithms) { return 4 * n_algorithms + 2; }

/// Epsilon-greedy choice over Q-values; increment is `initial_delta` for an
/// untouched algorithm and otherwise its spent budget, so spending doubles.
Action ddqn_act(const Mlp& net, const Eigen::VectorXd& state, double epsilon, Rng& rng,
                std::span<const double> spent, double initial_delta, int predicted_best);

struct Transition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

/// r + gamma * Q_target(s', argmax_a Q_online(s', a)), or r when terminal.
double ddqn_target(const Mlp& online, const Mlp& target, const Transition& t, double gamma);

/// One optimizer step on the mean squared TD error over `batch`. Returns the
/// loss before the update.
double ddqn_train_step(Mlp& online, const Mlp& target, std::span<const Transition> batch, double gamma,
                       AdamState& optimizer);

/// Fixed-capacity ring buffer with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

class DdqnAgent final : public Agent {
 public:
  explicit DdqnAgent(DdqnConfig config = {});

  std::string name() const override { return "ddqn"; }
  bool requires_meta_train() const override { return true; }
  bool ready() const override { return net_.has_value() || config_.allow_untrained; }

  void meta_train(const MetaDataset& md, std::span<const int> datasets, const MetaTrainContext& ctx) override;
  void reset(const Observation& initial, std::uint64_t seed) override;
  Action act(const Observation& obs) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<DdqnAgent>(*this); }

  nlohmann::json checkpoint() const override;
  void load_checkpoint(const nlohmann::json& j) override;
  std::vector<double> training_losses() const override { return losses_; }

  const std::optional<Mlp>& network() const noexcept { return net_; }
  const DdqnConfig& config() const noexcept { return config_; }

 private:
  Mlp fresh_network(std::size_t n_algorithms) const;

  DdqnConfig config_;
  std::optional<Mlp> net_;
  std::vector<double> losses_;
  Rng rng_;
};

}  // namespace lcarena
