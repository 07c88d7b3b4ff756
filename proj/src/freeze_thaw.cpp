#include "lcarena/freeze_thaw.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "lcarena/error.hpp"

namespace lcarena {

ArmPosterior fit_arm(std::span<const RevealedPoint> points, double next_cost, double total_budget,
                     double baseline, double prior_variance, double score_min, double score_max) {
  if (points.empty()) return {baseline, prior_variance};

  constexpr std::array<double, 4> kScales = {0.005, 0.02, 0.08, 0.3};
  constexpr std::array<double, 3> kRates = {0.5, 1.0, 2.0};
  const double n = static_cast<double>(points.size());
  // With a single point the slope is unidentified; the ridge term pins it
  // to zero so the fit is a constant.
  const double ridge = points.size() == 1 ? 1.0 : 1e-9;

  double best_sse = std::numeric_limits<double>::infinity();
  double best_mean = points.back().score;
  for (double scale_frac : kScales) {
    const double scale = scale_frac * total_budget;
    for (double rate : kRates) {
      double sg = 0, sgg = 0, sy = 0, sgy = 0;
      for (const auto& p : points) {
        const double g = std::pow(1.0 + p.cost / scale, -rate);
        sg += g;
        sgg += g * g;
        sy += p.score;
        sgy += g * p.score;
      }
      const double det = n * (sgg + ridge) - sg * sg;
      if (!(std::abs(det) > 1e-300)) continue;
      const double a = (sy * (sgg + ridge) - sg * sgy) / det;
      const double b = (n * sgy - sg * sy) / det;
      double sse = 0;
      for (const auto& p : points) {
        const double r = p.score - (a + b * std::pow(1.0 + p.cost / scale, -rate));
        sse += r * r;
      }
      if (sse < best_sse) {
        best_sse = sse;
        best_mean = a + b * std::pow(1.0 + next_cost / scale, -rate);
      }
    }
  }
  const double resid_var = best_sse / std::max(1.0, n - 2.0);
  return {std::clamp(best_mean, score_min, score_max), resid_var + prior_variance / (n + 1.0)};
}

double entropy_of_counts(std::span<const long> counts) {
  long total = 0;
  for (long c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

std::vector<double> entropy_search_acquisition(std::span<const ArmPosterior> arms, int samples,
                                               int quantiles, Rng& rng) {
  const std::size_t k = arms.size();
  if (k == 0) return {};
  if (samples < 1 || quantiles < 1) throw Error("invalid_config", "entropy search needs samples, quantiles >= 1");
  if (k == 1) return {0.0};
  for (const auto& a : arms)
    if (!(a.variance >= 0.0)) throw Error("invalid_posterior", "negative posterior variance");

  const auto m = static_cast<std::size_t>(samples);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  // Per sample: best and runner-up values with their arm indices.
  std::vector<double> top1(m), top2(m);
  std::vector<int> top1_idx(m), top2_idx(m);
  std::vector<long> base_counts(k, 0);
  for (std::size_t s = 0; s < m; ++s) {
    double v1 = -std::numeric_limits<double>::infinity(), v2 = v1;
    int i1 = -1, i2 = -1;
    for (std::size_t j = 0; j < k; ++j) {
      const double x = arms[j].mean + std::sqrt(arms[j].variance) * std_normal(rng);
      if (x > v1) {
        v2 = v1, i2 = i1;
        v1 = x, i1 = static_cast<int>(j);
      } else if (x > v2) {
        v2 = x, i2 = static_cast<int>(j);
      }
    }
    top1[s] = v1, top1_idx[s] = i1, top2[s] = v2, top2_idx[s] = i2;
    ++base_counts[static_cast<std::size_t>(i1)];
  }
  const double h0 = entropy_of_counts(base_counts);

  const boost::math::normal_distribution<double> unit;
  std::vector<double> acq(k, 0.0);
  std::vector<long> counts(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double sd = std::sqrt(arms[j].variance);
    double expected_h = 0.0;
    for (int q = 0; q < quantiles; ++q) {
      const double u = (q + 0.5) / quantiles;
      const double y = arms[j].mean + sd * boost::math::quantile(unit, u);
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t s = 0; s < m; ++s) {
        const bool j_top = top1_idx[s] == static_cast<int>(j);
        const double other = j_top ? top2[s] : top1[s];
        const int other_idx = j_top ? top2_idx[s] : top1_idx[s];
        const bool j_wins = y > other || (y == other && static_cast<int>(j) < other_idx);
        ++counts[j_wins ? j : static_cast<std::size_t>(other_idx)];
      }
      expected_h += entropy_of_counts(counts);
    }
    acq[j] = h0 - expected_h / quantiles;
  }
  return acq;
}

int argmax_with_tolerance(std::span<const double> values, double tolerance) {
  if (values.empty()) return 0;
  const double best = *std::max_element(values.begin(), values.end());
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] >= best - tolerance) return static_cast<int>(j);
  return 0;
}

std::vector<ArmPosterior> freezethaw_posteriors(const Observation& obs, const FreezeThawConfig& config) {
  const double step = config.delta_fraction * obs.total_budget;
  const double baseline = obs.context ? obs.context->baseline_score : 0.0;
  const double lo = obs.context ? obs.context->score_min : 0.0;
  const double hi = obs.context ? obs.context->score_max : 1.0;
  std::vector<ArmPosterior> arms;
  arms.reserve(obs.algorithms.size());
  for (const auto& a : obs.algorithms)
    arms.push_back(fit_arm(a.valid, a.spent + step, obs.total_budget, baseline, config.prior_variance, lo, hi));
  return arms;
}

Action freezethaw_act(const Observation& obs, const FreezeThawConfig& config, Rng& rng) {
  const auto arms = freezethaw_posteriors(obs, config);
  const auto acq = entropy_search_acquisition(arms, config.mc_samples, config.quantiles, rng);
  return {argmax_with_tolerance(acq, config.tie_tolerance), config.delta_fraction * obs.total_budget,
          predicted_best(obs)};
}

FreezeThawAgent::FreezeThawAgent(FreezeThawConfig config) : config_(config) {
  if (!(config_.delta_fraction > 0.0 && config_.delta_fraction <= 1.0))
    throw Error("invalid_config", "freeze_thaw delta_fraction must lie in (0, 1]");
  if (!(config_.prior_variance > 0.0)) throw Error("invalid_config", "freeze_thaw prior_variance must be positive");
}

void FreezeThawAgent::reset(const Observation&, std::uint64_t seed) { rng_ = make_rng(seed, {0x4654}); }

Action FreezeThawAgent::act(const Observation& obs) { return freezethaw_act(obs, config_, rng_); }

}  // namespace lcarena
