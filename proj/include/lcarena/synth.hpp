#pragma once

// Seeded synthetic meta-datasets built from a saturating power-law family.

#include <cstdint>
#include <string_view>

#include "lcarena/curve_store.hpp"

namespace lcarena {

enum class Scenario { generic, non_crossing, frequent_crossing };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);

/// score(cost) = pmax - (pmax - p0) * (1 + cost/scale)^(-rate)
struct CurveFamilyParams {
  double p0 = 0.0;
  double pmax = 1.0;
  double rate = 1.0;
  double scale = 1.0;
  double noise_sd = 0.0;
  bool crossing = false;  // late-bloomer parameterization
};

double curve_family_value(const CurveFamilyParams& p, double cost);

struct GenSpec {
  int n_datasets = 10;
  int n_algorithms = 10;
  CurveKind curve_kind = CurveKind::time_indexed;
  int anchors_per_curve = 10;
  double total_budget = 100.0;
  std::uint64_t seed = 0;
  Scenario scenario = Scenario::generic;
  double noise_sd = 0.01;
  /// Fraction of datasets assigned to meta-train; the rest are meta-test.
  double meta_train_fraction = 2.0 / 3.0;
  /// Size-indexed only: cost of training on 100% of the data, as a fraction
  /// of the dataset budget.
  double full_data_cost_fraction = 0.25;
};

/// Throws Error("invalid_spec") for non-positive counts or bad fractions.
MetaDataset generate(const GenSpec& spec);

/// Sign changes of the test-score difference between every pair of
/// algorithms, evaluated (left-hold) on the union of the pair's anchor costs
/// from the later of the two first anchors onwards. Zero differences are
/// skipped.
int crossing_count(const MetaDataset& md, int dataset);

/// Same count for a single pair of curves.
int crossing_count(const LearningCurve& a, const LearningCurve& b);

}  // namespace lcarena
