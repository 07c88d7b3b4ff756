#pragma once

// Freeze-thaw style selection: per-arm curve fits give a Gaussian belief
// about each algorithm's next performance, and the arm whose observation is
// expected to reduce the entropy of the argmax distribution the most is
// trained next.

#include <span>
#include <vector>

#include "lcarena/agent.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

struct ArmPosterior {
  double mean = 0.0;
  double variance = 0.0;
};

struct FreezeThawConfig {
  /// Fixed increment as a fraction of the dataset budget.
  double delta_fraction = 1.0 / 20.0;
  double prior_variance = 0.09;
  int mc_samples = 2000;
  int quantiles = 16;
  /// Acquisition values within this many nats of the best count as ties.
  double tie_tolerance = 1e-3;
};

/// Least-squares fit of the saturating power-law family (over a fixed grid
/// of scale and rate, linear in start and asymptote) to revealed points,
/// evaluated at `next_cost`. With no points the prior is returned.
ArmPosterior fit_arm(std::span<const RevealedPoint> points, double next_cost, double total_budget,
                     double baseline, double prior_variance, double score_min = 0.0,
                     double score_max = 1.0);

/// Entropy (nats) of the distribution of counts.
double entropy_of_counts(std::span<const long> counts);

/// f(j) = H(P_max) - E_y[H(P_max | arm j yields y)], estimated from
/// `samples` joint draws and a midpoint quantile grid of size `quantiles`
/// over arm j's predictive.
std::vector<double> entropy_search_acquisition(std::span<const ArmPosterior> arms, int samples,
                                               int quantiles, Rng& rng);

/// Index of the largest value; values within `tolerance` of the maximum
/// resolve to the lowest index.
int argmax_with_tolerance(std::span<const double> values, double tolerance);

/// Per-arm posteriors for the current observation.
std::vector<ArmPosterior> freezethaw_posteriors(const Observation& obs, const FreezeThawConfig& config);

Action freezethaw_act(const Observation& obs, const FreezeThawConfig& config, Rng& rng);

class FreezeThawAgent final : public Agent {
 public:
  explicit FreezeThawAgent(FreezeThawConfig config = {});
  std::string name() const override { return "freeze_thaw"; }
  void reset(const Observation& initial, std::uint64_t seed) override;
  Action act(const Observation& obs) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<FreezeThawAgent>(*this); }

 private:
  FreezeThawConfig config_;
  Rng rng_;
};

}  // namespace lcarena
