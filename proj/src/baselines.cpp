#include "lcarena/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "lcarena/error.hpp"

namespace lcarena {

int predicted_best(const Observation& obs) {
  int best = -1;
  double best_score = 0.0;
  for (std::size_t j = 0; j < obs.algorithms.size(); ++j) {
    const auto& valid = obs.algorithms[j].valid;
    if (valid.empty()) continue;
    if (best < 0 || valid.back().score > best_score) {
      best = static_cast<int>(j);
      best_score = valid.back().score;
    }
  }
  return best < 0 ? 0 : best;
}

// ---------------------------------------------------------------- RandSearch

Action randsearch_act(const Observation& obs, Rng& rng, double delta_min, double delta_max) {
  if (!(delta_min <= delta_max)) throw Error("invalid_config", "rand_search needs delta_min <= delta_max");
  if (obs.algorithms.empty()) throw Error("invalid_observation", "no algorithms");
  const int algo = std::uniform_int_distribution<int>(0, static_cast<int>(obs.algorithms.size()) - 1)(rng);
  // uniform_real_distribution requires a < b.
  const double delta =
      delta_min == delta_max ? delta_min : std::uniform_real_distribution<double>(delta_min, delta_max)(rng);
  return {algo, delta, predicted_best(obs)};
}

RandSearchAgent::RandSearchAgent(RandSearchConfig config) : config_(config) {
  if (!(config_.delta_min_fraction > 0.0) || !(config_.delta_min_fraction <= config_.delta_max_fraction))
    throw Error("invalid_config", "rand_search needs 0 < delta_min_fraction <= delta_max_fraction");
}

void RandSearchAgent::reset(const Observation&, std::uint64_t seed) { rng_ = make_rng(seed, {0x5241'4e44}); }

Action RandSearchAgent::act(const Observation& obs) {
  return randsearch_act(obs, rng_, config_.delta_min_fraction * obs.total_budget,
                        config_.delta_max_fraction * obs.total_budget);
}

// ----------------------------------------------------------- BestOnSamples

Action bos_act(const Observation& obs, double alpha) {
  const auto n = obs.algorithms.size();
  if (!(alpha > 0.0) || !(alpha * static_cast<double>(n) < obs.total_budget))
    throw Error("invalid_config", "bos probe budget alpha * |algorithms| must be below the total budget");

  for (std::size_t j = 0; j < n; ++j)
    if (obs.algorithms[j].valid.empty()) return {static_cast<int>(j), alpha, predicted_best(obs)};

  // Commit: best valid score at the probe budget.
  int chosen = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (obs.algorithms[j].valid.front().score > obs.algorithms[static_cast<std::size_t>(chosen)].valid.front().score)
      chosen = static_cast<int>(j);
  return {chosen, obs.remaining, predicted_best(obs)};
}

BosAgent::BosAgent(BosConfig config) : config_(config) {
  if (config_.alpha && !(*config_.alpha > 0.0)) throw Error("invalid_config", "bos alpha must be positive");
  if (!(config_.alpha_fraction > 0.0 && config_.alpha_fraction < 1.0))
    throw Error("invalid_config", "bos alpha_fraction must lie in (0, 1)");
}

double BosAgent::alpha_for(const Observation& obs) const {
  if (config_.alpha) return *config_.alpha;
  return config_.alpha_fraction * obs.total_budget / static_cast<double>(obs.algorithms.size());
}

void BosAgent::reset(const Observation&, std::uint64_t) {}

Action BosAgent::act(const Observation& obs) { return bos_act(obs, alpha_for(obs)); }

// ------------------------------------------------------------------ AvgRank

AverageRanking average_ranking(const std::vector<std::vector<int>>& ranks) {
  if (ranks.empty()) throw Error("empty_meta_train", "average rank needs at least one dataset");
  const std::size_t n = ranks.front().size();
  AverageRanking out;
  out.average_rank.assign(n, 0.0);
  for (const auto& r : ranks) {
    if (r.size() != n) throw Error("shape_mismatch", "rank vectors differ in length");
    for (std::size_t j = 0; j < n; ++j) out.average_rank[j] += r[j];
  }
  for (auto& v : out.average_rank) v /= static_cast<double>(ranks.size());
  out.selected = static_cast<int>(std::min_element(out.average_rank.begin(), out.average_rank.end()) -
                                  out.average_rank.begin());
  return out;
}

AverageRanking avgrank_meta_train(const MetaDataset& md, std::span<const int> datasets) {
  std::vector<std::vector<int>> ranks;
  std::vector<double> scores(md.num_algorithms());
  for (int d : datasets) {
    for (std::size_t j = 0; j < scores.size(); ++j)
      scores[j] = md.curve(d, static_cast<int>(j), Split::valid).back().score;
    ranks.push_back(rank_descending(scores));
  }
  return average_ranking(ranks);
}

Action avgrank_act(const AverageRanking& ranking, const Observation& obs) {
  return {ranking.selected, obs.remaining, ranking.selected};
}

void AvgRankAgent::meta_train(const MetaDataset& md, std::span<const int> datasets, const MetaTrainContext&) {
  ranking_ = avgrank_meta_train(md, datasets);
}

void AvgRankAgent::reset(const Observation& initial, std::uint64_t) {
  if (!ranking_) throw Error("not_meta_trained", "avg_rank has no ranking; run train first");
  if (ranking_->average_rank.size() != initial.algorithms.size())
    throw Error("shape_mismatch", "avg_rank ranking covers a different number of algorithms");
}

Action AvgRankAgent::act(const Observation& obs) {
  if (!ranking_) throw Error("not_meta_trained", "avg_rank has no ranking; run train first");
  return avgrank_act(*ranking_, obs);
}

nlohmann::json AvgRankAgent::checkpoint() const {
  if (!ranking_) return nullptr;
  return {{"schema", "lc-arena/avg-rank/1"},
          {"average_rank", ranking_->average_rank},
          {"selected", ranking_->selected}};
}

void AvgRankAgent::load_checkpoint(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != "lc-arena/avg-rank/1")
    throw Error("malformed_checkpoint", "expected an avg_rank ranking checkpoint");
  AverageRanking r;
  r.average_rank = j.at("average_rank").get<std::vector<double>>();
  r.selected = j.at("selected").get<int>();
  if (r.selected < 0 || static_cast<std::size_t>(r.selected) >= r.average_rank.size())
    throw Error("malformed_checkpoint", "selected algorithm out of range");
  ranking_ = std::move(r);
}

}  // namespace lcarena
