#include "lcarena/environment.hpp"

#include <algorithm>
#include <cmath>

#include "lcarena/error.hpp"

namespace lcarena {

using nlohmann::json;

std::string_view to_string(RevealMode mode) {
  return mode == RevealMode::full_curve ? "full_curve" : "last_point_only";
}

RevealMode reveal_mode_from_string(std::string_view s) {
  if (s == "full_curve") return RevealMode::full_curve;
  if (s == "last_point_only") return RevealMode::last_point_only;
  throw Error("invalid_config", "unknown reveal mode '" + std::string(s) + "'");
}

double normalized_time(double spent, double total, double sigma) {
  return std::log1p(spent / sigma) / std::log1p(total / sigma);
}

double reward(double prev_best_test, double new_best_test, double t_tilde) {
  return (new_best_test - prev_best_test) * (1.0 - t_tilde);
}

double accumulated_alc(std::span<const double> rewards) {
  double total = 0.0;
  for (double r : rewards) total += r;
  return total;
}

json to_json(const Observation& obs) {
  json algos = json::array();
  for (std::size_t j = 0; j < obs.algorithms.size(); ++j) {
    const auto& p = obs.algorithms[j];
    json train = json::array(), valid = json::array();
    for (const auto& pt : p.train) train.push_back({pt.cost, pt.score});
    for (const auto& pt : p.valid) valid.push_back({pt.cost, pt.score});
    algos.push_back({{"spent", p.spent}, {"train", train}, {"valid", valid}});
  }
  json j = {{"step", obs.step},
            {"total_budget", obs.total_budget},
            {"remaining", obs.remaining},
            {"t_tilde", obs.t_tilde},
            {"algorithms", algos}};
  if (obs.last_action)
    j["last_action"] = {{"algo", obs.last_action->algo},
                        {"delta", obs.last_action->delta},
                        {"predicted_best", obs.last_action->predicted_best}};
  if (obs.context) {
    json hp = json::array();
    for (const auto& a : obs.context->algorithms) {
      json h = json::object();
      for (const auto& [k, v] : a.hyperparameters) {
        if (const auto* d = std::get_if<double>(&v))
          h[k] = *d;
        else
          h[k] = std::get<std::string>(v);
      }
      hp.push_back({{"id", a.id}, {"family", a.family}, {"hyperparameters", h}});
    }
    j["dataset"] = {{"id", obs.context->dataset_id},
                    {"name", obs.context->dataset_name},
                    {"meta_features", obs.context->meta_features}};
    j["hyperparameters"] = hp;
  }
  return j;
}

// ---------------------------------------------------------------------------

Environment::Environment(const MetaDataset& md, RevealMode mode) : md_(md), mode_(mode) {}

Observation Environment::reset(int dataset, const RewardConfig& cfg) {
  const auto& spec = md_.dataset(dataset);
  const double sigma = cfg.sigma.value_or(spec.total_budget / 10.0);
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error("invalid_config", "reward sigma must be positive");

  auto ctx = std::make_shared<EpisodeContext>();
  ctx->dataset_id = spec.id;
  ctx->dataset_name = spec.name;
  ctx->meta_features = spec.meta_features;
  ctx->algorithms.assign(md_.algorithms().begin(), md_.algorithms().end());
  ctx->baseline_score = md_.baseline_score();
  ctx->score_min = md_.score_min();
  ctx->score_max = md_.score_max();
  ctx->curve_kind = md_.curve_kind();
  ctx->anchor_grid.assign(md_.anchor_grid().begin(), md_.anchor_grid().end());
  context_ = std::move(ctx);

  dataset_ = dataset;
  sigma_ = sigma;
  prev_best_test_ = cfg.baseline_score;
  done_ = false;

  obs_ = Observation{};
  obs_.context = context_;
  obs_.total_budget = spec.total_budget;
  obs_.remaining = spec.total_budget;
  obs_.t_tilde = 0.0;
  obs_.algorithms.assign(md_.num_algorithms(), AlgorithmProgress{});
  return obs_;
}

double Environment::reveal(int algo, Split split) const {
  const auto& curve = md_.curve(dataset_, algo, split);
  if (mode_ == RevealMode::last_point_only) return curve.back().score;
  return query_curve(curve, obs_.algorithms[static_cast<std::size_t>(algo)].spent,
                     md_.baseline_score());
}

// Size-indexed curves only carry information at grid costs, so a request is
// rounded down to the largest grid point it reaches. Requests that stay
// within one grid step are charged unchanged.
double Environment::snap_charge(int algo, double charge) const {
  if (md_.curve_kind() != CurveKind::size_indexed) return charge;
  const double spent = obs_.algorithms[static_cast<std::size_t>(algo)].spent;
  const auto grid = md_.anchor_grid();
  auto it = std::upper_bound(grid.begin(), grid.end(), spent + charge);
  if (it == grid.begin()) return charge;
  const double reachable = *std::prev(it);
  return reachable > spent ? reachable - spent : charge;
}

StepResult Environment::step(const Action& action) {
  if (!started()) throw Error("not_started", "step called before reset");
  if (done_) throw Error("episode_done", "step called after the episode ended");
  const int n = static_cast<int>(md_.num_algorithms());
  if (action.algo < 0 || action.algo >= n)
    throw Error("invalid_action", "algorithm index " + std::to_string(action.algo) + " out of range");
  if (action.predicted_best < 0 || action.predicted_best >= n)
    throw Error("invalid_action",
                "predicted_best index " + std::to_string(action.predicted_best) + " out of range");
  if (!(action.delta > 0.0) || !std::isfinite(action.delta))
    throw Error("invalid_action", "budget increment must be positive");

  auto& progress = obs_.algorithms[static_cast<std::size_t>(action.algo)];
  double charged = snap_charge(action.algo, std::min(action.delta, obs_.remaining));
  if (md_.curve_kind() == CurveKind::size_indexed) {
    // Land exactly on the grid point rather than accumulating rounding.
    const auto grid = md_.anchor_grid();
    const double target = progress.spent + charged;
    auto it = std::lower_bound(grid.begin(), grid.end(), target);
    progress.spent = (it != grid.end() && *it - target <= 1e-12 * std::max(1.0, *it)) ? *it : target;
  } else {
    progress.spent += charged;
  }
  if (charged >= obs_.remaining) {
    charged = obs_.remaining;
    obs_.remaining = 0.0;
  } else {
    obs_.remaining -= charged;
  }

  const double train = reveal(action.algo, Split::train);
  const double valid = reveal(action.algo, Split::valid);
  progress.train.push_back({progress.spent, train});
  progress.valid.push_back({progress.spent, valid});

  const double spent_total = obs_.remaining == 0.0 ? obs_.total_budget : obs_.total_budget - obs_.remaining;
  const double t_tilde = normalized_time(spent_total, obs_.total_budget, sigma_);
  const double best_spent = obs_.algorithms[static_cast<std::size_t>(action.predicted_best)].spent;
  const double new_best = query_curve(md_.curve(dataset_, action.predicted_best, Split::test),
                                      best_spent, md_.baseline_score());
  const double r = reward(prev_best_test_, new_best, t_tilde);
  prev_best_test_ = new_best;

  obs_.t_tilde = t_tilde;
  obs_.last_action = action;
  ++obs_.step;
  done_ = obs_.remaining == 0.0;

  if (log_) {
    json rec = {{"t", obs_.step - 1},         {"algo", action.algo},
                {"delta", action.delta},       {"charged", charged},
                {"t_tilde", t_tilde},          {"reward", r},
                {"revealed_train", train},     {"revealed_valid", valid},
                {"predicted_best", action.predicted_best}};
    *log_ << rec.dump() << '\n';
  }
  return StepResult{obs_, r, done_, charged};
}

}  // namespace lcarena
