#include "lcarena/ddqn.hpp"

#include <algorithm>
#include <cmath>

#include "lcarena/error.hpp"

namespace lcarena {

namespace {

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index idx = 0;
  v.maxCoeff(&idx);  // first maximum
  return static_cast<int>(idx);
}

}  // namespace

void validate(const DdqnConfig& c) {
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw Error("invalid_config", "ddqn gamma must lie in [0, 1]");
  if (c.batch_size < 1 || c.replay_capacity < c.batch_size)
    throw Error("invalid_config", "ddqn replay capacity must be >= batch size >= 1");
  if (c.target_sync_interval < 1) throw Error("invalid_config", "ddqn target sync interval must be >= 1");
  if (c.train_episodes < 0) throw Error("invalid_config", "ddqn train_episodes must be >= 0");
  if (!(c.initial_budget_fraction > 0.0 && c.initial_budget_fraction <= 1.0))
    throw Error("invalid_config", "ddqn initial_budget_fraction must lie in (0, 1]");
  for (int h : c.hidden)
    if (h < 1) throw Error("invalid_config", "ddqn hidden sizes must be positive");
  for (double e : {c.epsilon_start, c.epsilon_end, c.eval_epsilon})
    if (!(e >= 0.0 && e <= 1.0)) throw Error("invalid_config", "ddqn epsilon values must lie in [0, 1]");
}

Eigen::VectorXd ddqn_encode(const Observation& obs) {
  const std::size_t n = obs.algorithms.size();
  const double baseline = obs.context ? obs.context->baseline_score : 0.0;
  Eigen::VectorXd s(static_cast<Eigen::Index>(ddqn_state_size(n)));
  for (std::size_t j = 0; j < n; ++j) {
    const auto& a = obs.algorithms[j];
    const auto base = static_cast<Eigen::Index>(4 * j);
    if (a.valid.empty()) {
      s(base) = baseline;
      s(base + 1) = baseline;
      s(base + 3) = 0.0;
    } else {
      double best = a.valid.front().score;
      for (const auto& p : a.valid) best = std::max(best, p.score);
      s(base) = a.valid.back().score;
      s(base + 1) = best;
      s(base + 3) = 1.0;
    }
    s(base + 2) = a.spent / obs.total_budget;
  }
  s(static_cast<Eigen::Index>(4 * n)) = obs.t_tilde;
  s(static_cast<Eigen::Index>(4 * n + 1)) = obs.remaining / obs.total_budget;
  return s;
}

Action ddqn_act(const Mlp& net, const Eigen::VectorXd& state, double epsilon, Rng& rng,
                std::span<const double> spent, double initial_delta, int predicted_best) {
  const int n = net.output_size();
  if (static_cast<std::size_t>(n) != spent.size())
    throw Error("shape_mismatch", "network output size does not match the number of algorithms");
  int algo = 0;
  if (epsilon > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon)
    algo = std::uniform_int_distribution<int>(0, n - 1)(rng);
  else
    algo = argmax(net.forward(state));
  const double tau = spent[static_cast<std::size_t>(algo)];
  return {algo, tau > 0.0 ? tau : initial_delta, predicted_best};
}

double ddqn_target(const Mlp& online, const Mlp& target, const Transition& t, double gamma) {
  if (t.done) return t.reward;
  const int a_star = argmax(online.forward(t.next_state));
  return t.reward + gamma * target.forward(t.next_state)(a_star);
}

double ddqn_train_step(Mlp& online, const Mlp& target, std::span<const Transition> batch, double gamma,
                       AdamState& optimizer) {
  if (batch.empty()) return 0.0;
  // Targets use the pre-update online network.
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const auto& t : batch) ys.push_back(ddqn_target(online, target, t, gamma));

  MlpParams grads = online.params();
  grads.set_zero();
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double q = online.forward(batch[i].state)(batch[i].action);
    loss += (ys[i] - q) * (ys[i] - q);
    grads += online.backward(batch[i].state, batch[i].action, ys[i]);
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  grads *= scale;
  adam_step(online, grads, optimizer);
  return loss * scale;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error("invalid_config", "replay capacity must be positive");
  items_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(items_[pick(rng)]);
  return out;
}

// ---------------------------------------------------------------------------

DdqnAgent::DdqnAgent(DdqnConfig config) : config_(std::move(config)) { validate(config_); }

Mlp DdqnAgent::fresh_network(std::size_t n_algorithms) const {
  std::vector<int> sizes{static_cast<int>(ddqn_state_size(n_algorithms))};
  sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
  sizes.push_back(static_cast<int>(n_algorithms));
  return Mlp(sizes, substream_seed(config_.seed, {0x4e4554}));
}

void DdqnAgent::meta_train(const MetaDataset& md, std::span<const int> datasets, const MetaTrainContext& ctx) {
  if (datasets.empty()) throw Error("empty_meta_train", "ddqn meta-training needs at least one dataset");
  const std::size_t n = md.num_algorithms();
  Mlp online = fresh_network(n);
  Mlp target = copy_params(online);
  AdamState adam = AdamState::for_net(online, AdamConfig{config_.learning_rate});
  ReplayBuffer replay(config_.replay_capacity);
  Rng rng = make_rng(config_.seed, {0x5452'4149'4e});
  Environment env(md, ctx.reveal);
  losses_.clear();

  const double decay_episodes = std::max(1.0, config_.epsilon_decay_fraction * config_.train_episodes);
  std::uniform_int_distribution<std::size_t> pick_dataset(0, datasets.size() - 1);
  long updates = 0;
  for (int episode = 0; episode < config_.train_episodes; ++episode) {
    const double frac = std::min(1.0, episode / decay_episodes);
    const double epsilon = config_.epsilon_start + (config_.epsilon_end - config_.epsilon_start) * frac;
    Observation obs = env.reset(datasets[pick_dataset(rng)], ctx.reward);
    const double initial_delta = config_.initial_budget_fraction * obs.total_budget;
    Eigen::VectorXd state = ddqn_encode(obs);
    bool done = false;
    std::vector<double> spent(n);
    while (!done) {
      for (std::size_t j = 0; j < n; ++j) spent[j] = obs.algorithms[j].spent;
      const Action action = ddqn_act(online, state, epsilon, rng, spent, initial_delta, predicted_best(obs));
      StepResult res = env.step(action);
      Eigen::VectorXd next_state = ddqn_encode(res.observation);
      replay.push({state, action.algo, res.reward, next_state, res.done});
      if (replay.size() >= config_.batch_size) {
        const auto batch = replay.sample(config_.batch_size, rng);
        losses_.push_back(ddqn_train_step(online, target, batch, config_.gamma, adam));
        if (++updates % config_.target_sync_interval == 0) target = copy_params(online);
      }
      obs = std::move(res.observation);
      state = std::move(next_state);
      done = res.done;
    }
  }
  net_ = std::move(online);
}

void DdqnAgent::reset(const Observation& initial, std::uint64_t seed) {
  if (!net_) {
    if (!config_.allow_untrained) throw Error("not_meta_trained", "ddqn has no trained network; run train first");
    net_ = fresh_network(initial.algorithms.size());
  }
  if (static_cast<std::size_t>(net_->output_size()) != initial.algorithms.size() ||
      static_cast<std::size_t>(net_->input_size()) != ddqn_state_size(initial.algorithms.size()))
    throw Error("shape_mismatch", "ddqn network does not match the number of algorithms");
  rng_ = make_rng(seed, {0x4444'514e});
}

Action DdqnAgent::act(const Observation& obs) {
  if (!net_) throw Error("not_meta_trained", "ddqn has no network; call reset first");
  std::vector<double> spent(obs.algorithms.size());
  for (std::size_t j = 0; j < spent.size(); ++j) spent[j] = obs.algorithms[j].spent;
  return ddqn_act(*net_, ddqn_encode(obs), config_.eval_epsilon, rng_, spent,
                  config_.initial_budget_fraction * obs.total_budget, predicted_best(obs));
}

nlohmann::json DdqnAgent::checkpoint() const {
  if (!net_) return nullptr;
  return {{"schema", "lc-arena/ddqn/1"}, {"network", to_json(*net_)}};
}

void DdqnAgent::load_checkpoint(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != "lc-arena/ddqn/1")
    throw Error("malformed_checkpoint", "expected a ddqn checkpoint");
  net_ = mlp_from_json(j.at("network"));
}

}  // namespace lcarena
