#pragma once

// Budget-limited reveal game over a MetaDataset.

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcarena/curve_store.hpp"

namespace lcarena {

struct Action {
  int algo = 0;
  double delta = 0.0;
  int predicted_best = 0;
  friend bool operator==(const Action&, const Action&) = default;
};

struct RevealedPoint {
  double cost = 0.0;
  double score = 0.0;
  friend bool operator==(const RevealedPoint&, const RevealedPoint&) = default;
};

/// What the agent knows about one algorithm in the current episode.
struct AlgorithmProgress {
  double spent = 0.0;
  std::vector<RevealedPoint> train;
  std::vector<RevealedPoint> valid;
  friend bool operator==(const AlgorithmProgress&, const AlgorithmProgress&) = default;
};

/// Static per-episode context shared by all observations of an episode.
struct EpisodeContext {
  int dataset_id = 0;
  std::string dataset_name;
  std::map<std::string, double> meta_features;
  std::vector<AlgorithmSpec> algorithms;
  double baseline_score = 0.0;
  double score_min = 0.0;
  double score_max = 1.0;
  CurveKind curve_kind = CurveKind::time_indexed;
  std::vector<double> anchor_grid;
};

/// Agent-visible state. Built only from train/valid curves.
struct Observation {
  std::shared_ptr<const EpisodeContext> context;
  double total_budget = 0.0;
  double remaining = 0.0;
  double t_tilde = 0.0;
  int step = 0;
  std::vector<AlgorithmProgress> algorithms;
  std::optional<Action> last_action;

  std::size_t num_algorithms() const noexcept { return algorithms.size(); }
  double spent_total() const noexcept { return total_budget - remaining; }

  friend bool operator==(const Observation& a, const Observation& b) {
    return a.total_budget == b.total_budget && a.remaining == b.remaining &&
           a.t_tilde == b.t_tilde && a.step == b.step && a.algorithms == b.algorithms &&
           a.last_action == b.last_action;
  }
};

nlohmann::json to_json(const Observation& obs);

struct RewardConfig {
  /// Normalization constant of the log time scale; unset means T_i / 10.
  std::optional<double> sigma;
  /// Reference test performance before the first prediction.
  double baseline_score = 0.0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  double charged = 0.0;
};

/// How train/valid queries are answered.
enum class RevealMode {
  full_curve,       // left-hold value at the current spent budget
  last_point_only,  // the curve's final anchor, whatever was spent
};

std::string_view to_string(RevealMode mode);
RevealMode reveal_mode_from_string(std::string_view s);

/// log(1 + spent/sigma) / log(1 + total/sigma).
double normalized_time(double spent, double total, double sigma);

/// (new_best - prev_best) * (1 - t_tilde). Not clamped.
double reward(double prev_best_test, double new_best_test, double t_tilde);

/// Sum of per-step rewards, i.e. the episode's area under the learning curve.
double accumulated_alc(std::span<const double> rewards);

/// One episode at a time. Not thread-safe; the MetaDataset must outlive it.
class Environment {
 public:
  explicit Environment(const MetaDataset& md, RevealMode mode = RevealMode::full_curve);

  Observation reset(int dataset, const RewardConfig& cfg);
  StepResult step(const Action& action);

  bool done() const noexcept { return done_; }
  bool started() const noexcept { return context_ != nullptr; }
  double sigma() const noexcept { return sigma_; }
  const MetaDataset& metadataset() const noexcept { return md_; }
  RevealMode reveal_mode() const noexcept { return mode_; }

  /// Test performance of the last predicted-best algorithm. Privileged:
  /// for scoring and trajectory logging, never handed to agents.
  double current_best_test() const noexcept { return prev_best_test_; }

  /// Optional JSON Lines sink receiving one record per step.
  void set_step_log(std::ostream* log) noexcept { log_ = log; }

 private:
  double reveal(int algo, Split split) const;
  double snap_charge(int algo, double charge) const;

  const MetaDataset& md_;
  RevealMode mode_;
  std::shared_ptr<const EpisodeContext> context_;
  int dataset_ = -1;
  double sigma_ = 1.0;
  double prev_best_test_ = 0.0;
  bool done_ = false;
  Observation obs_;
  std::ostream* log_ = nullptr;
};

}  // namespace lcarena
