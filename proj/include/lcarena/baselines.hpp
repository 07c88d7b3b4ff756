#pragma once

// Heuristic baselines: random search, best-on-samples, average rank.

#include <optional>
#include <vector>

#include "lcarena/agent.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

// ---------------------------------------------------------------- RandSearch

/// Uniform algorithm, uniform increment in [delta_min, delta_max].
Action randsearch_act(const Observation& obs, Rng& rng, double delta_min, double delta_max);

struct RandSearchConfig {
  // Increment bounds as fractions of the dataset budget.
  double delta_min_fraction = 1.0 / 50.0;
  double delta_max_fraction = 1.0 / 5.0;
};

class RandSearchAgent final : public Agent {
 public:
  explicit RandSearchAgent(RandSearchConfig config = {});
  std::string name() const override { return "rand_search"; }
  void reset(const Observation& initial, std::uint64_t seed) override;
  Action act(const Observation& obs) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RandSearchAgent>(*this); }

 private:
  RandSearchConfig config_;
  Rng rng_;
};

// ----------------------------------------------------------- BestOnSamples

/// Probe every algorithm once with `alpha`, then spend everything left on
/// the best probe. Throws Error("invalid_config") when alpha * |algorithms|
/// does not fit strictly inside the budget.
Action bos_act(const Observation& obs, double alpha);

struct BosConfig {
  /// alpha = alpha_fraction * T / |algorithms| unless `alpha` is set.
  double alpha_fraction = 0.2;
  std::optional<double> alpha;
};

class BosAgent final : public Agent {
 public:
  explicit BosAgent(BosConfig config = {});
  std::string name() const override { return "bos"; }
  void reset(const Observation& initial, std::uint64_t seed) override;
  Action act(const Observation& obs) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<BosAgent>(*this); }

  double alpha_for(const Observation& obs) const;

 private:
  BosConfig config_;
};

// ------------------------------------------------------------------ AvgRank

struct AverageRanking {
  std::vector<double> average_rank;  // indexed by algorithm id
  int selected = 0;                  // lowest average rank, lowest id on ties
};

/// `ranks[d][j]` is the rank of algorithm j on meta-train dataset d.
AverageRanking average_ranking(const std::vector<std::vector<int>>& ranks);

/// Ranks from final valid-curve scores on each dataset, then averaged.
AverageRanking avgrank_meta_train(const MetaDataset& md, std::span<const int> datasets);

/// Spend the whole remaining budget on the selected algorithm.
Action avgrank_act(const AverageRanking& ranking, const Observation& obs);

class AvgRankAgent final : public Agent {
 public:
  std::string name() const override { return "avg_rank"; }
  bool requires_meta_train() const override { return true; }
  bool ready() const override { return ranking_.has_value(); }
  void meta_train(const MetaDataset& md, std::span<const int> datasets,
                  const MetaTrainContext& ctx) override;
  void reset(const Observation& initial, std::uint64_t seed) override;
  Action act(const Observation& obs) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<AvgRankAgent>(*this); }
  nlohmann::json checkpoint() const override;
  void load_checkpoint(const nlohmann::json& j) override;

  const std::optional<AverageRanking>& ranking() const noexcept { return ranking_; }

 private:
  std::optional<AverageRanking> ranking_;
};

}  // namespace lcarena
