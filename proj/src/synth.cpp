#include "lcarena/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "lcarena/error.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

namespace {

constexpr std::array<const char*, 4> kFamilies = {"sgd", "adaboost", "knn", "mlp"};

// Substream tags.
enum : std::uint64_t { kTagAlgorithm = 1, kTagDataset = 2, kTagCurve = 3, kTagSplit = 4 };

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

double normal(Rng& rng, double sd) {
  if (sd <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sd)(rng);
}

// Latent properties an algorithm carries across datasets. They are pure
// functions of the hyperparameters so similar settings give similar curves.
struct AlgorithmLatent {
  int family = 0;
  double capacity = 0.0;
  double learning_rate = 0.0;
  double regularization = 0.0;
  double quality = 0.0;
  double rate = 1.0;
};

AlgorithmLatent latent_from_hyper(int family, double capacity, double lr, double reg) {
  AlgorithmLatent l;
  l.family = family;
  l.capacity = capacity;
  l.learning_rate = lr;
  l.regularization = reg;
  const double lr_fit = 1.0 - std::min(1.0, std::abs(std::log10(lr) + 1.5) / 1.5);
  l.quality = std::clamp(0.5 * capacity + 0.35 * lr_fit + 0.15 * (1.0 - std::abs(reg - 0.3)), 0.0, 1.0);
  l.rate = 0.4 + 1.2 * (std::log10(lr) + 3.0) / 3.0;
  return l;
}

struct DatasetLatent {
  double base = 0.4;
  double headroom = 0.3;
  std::array<double, kFamilies.size()> family_affinity{};
  // non_crossing: shared curve shape per dataset.
  double shared_scale = 1.0;
  double shared_rate = 1.0;
  double shared_start = 0.3;
};

std::vector<double> geometric_grid(double first, double last, int n) {
  std::vector<double> grid(static_cast<std::size_t>(n));
  if (n == 1) {
    grid[0] = last;
    return grid;
  }
  const double ratio = std::pow(last / first, 1.0 / (n - 1));
  for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = first * std::pow(ratio, k);
  grid.back() = last;
  return grid;
}

void validate(const GenSpec& spec) {
  if (spec.n_datasets < 1 || spec.n_algorithms < 1 || spec.anchors_per_curve < 1)
    throw Error("invalid_spec", "dataset, algorithm and anchor counts must be >= 1");
  if (!(spec.total_budget > 0.0) || !std::isfinite(spec.total_budget))
    throw Error("invalid_spec", "total_budget must be positive");
  if (!(spec.noise_sd >= 0.0)) throw Error("invalid_spec", "noise_sd must be nonnegative");
  if (!(spec.meta_train_fraction >= 0.0 && spec.meta_train_fraction <= 1.0))
    throw Error("invalid_spec", "meta_train_fraction must lie in [0, 1]");
  if (!(spec.full_data_cost_fraction > 0.0 && spec.full_data_cost_fraction <= 1.0))
    throw Error("invalid_spec", "full_data_cost_fraction must lie in (0, 1]");
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::generic: return "generic";
    case Scenario::non_crossing: return "non_crossing";
    case Scenario::frequent_crossing: return "frequent_crossing";
  }
  return "?";
}

Scenario scenario_from_string(std::string_view s) {
  if (s == "generic") return Scenario::generic;
  if (s == "non_crossing") return Scenario::non_crossing;
  if (s == "frequent_crossing") return Scenario::frequent_crossing;
  throw Error("invalid_spec", "unknown scenario '" + std::string(s) + "'");
}

double curve_family_value(const CurveFamilyParams& p, double cost) {
  return p.pmax - (p.pmax - p.p0) * std::pow(1.0 + cost / p.scale, -p.rate);
}

MetaDataset generate(const GenSpec& spec) {
  validate(spec);
  const double T = spec.total_budget;
  const int n_anchor = spec.anchors_per_curve;
  const bool non_crossing = spec.scenario == Scenario::non_crossing;

  MetaDatasetParts parts;
  parts.curve_kind = spec.curve_kind;
  if (spec.curve_kind == CurveKind::size_indexed) {
    for (int k = 1; k <= n_anchor; ++k)
      parts.anchor_grid.push_back(T * spec.full_data_cost_fraction * k / n_anchor);
  }

  std::vector<AlgorithmLatent> algos;
  for (int a = 0; a < spec.n_algorithms; ++a) {
    Rng rng = make_rng(spec.seed, {kTagAlgorithm, static_cast<std::uint64_t>(a)});
    const int family = static_cast<int>(std::uniform_int_distribution<int>(0, kFamilies.size() - 1)(rng));
    const double capacity = uniform(rng, 0.0, 1.0);
    const double lr = log_uniform(rng, 1e-3, 1.0);
    const double reg = uniform(rng, 0.0, 1.0);
    AlgorithmSpec as;
    as.id = a;
    as.family = kFamilies[static_cast<std::size_t>(family)];
    as.hyperparameters["capacity"] = capacity;
    as.hyperparameters["learning_rate"] = lr;
    as.hyperparameters["regularization"] = reg;
    if (as.family == "adaboost" || as.family == "mlp")
      as.hyperparameters["depth"] = static_cast<double>(std::uniform_int_distribution<int>(1, 8)(rng));
    parts.algorithms.push_back(std::move(as));
    algos.push_back(latent_from_hyper(family, capacity, lr, reg));
  }

  std::vector<DatasetLatent> dlat;
  for (int d = 0; d < spec.n_datasets; ++d) {
    Rng rng = make_rng(spec.seed, {kTagDataset, static_cast<std::uint64_t>(d)});
    DatasetSpec ds;
    ds.id = d;
    ds.name = "synthetic_" + std::to_string(d);
    ds.total_budget = T;
    ds.meta_features["n_examples"] = std::round(log_uniform(rng, 1e3, 1e6));
    ds.meta_features["n_features"] = std::round(log_uniform(rng, 10.0, 1e4));
    ds.meta_features["n_classes"] = static_cast<double>(std::uniform_int_distribution<int>(2, 100)(rng));
    ds.meta_features["sparsity"] = uniform(rng, 0.0, 1.0);
    parts.datasets.push_back(std::move(ds));

    DatasetLatent l;
    l.base = uniform(rng, 0.3, 0.5);
    l.headroom = uniform(rng, 0.25, 0.4);
    for (auto& f : l.family_affinity) f = normal(rng, 0.05);
    l.shared_scale = T * uniform(rng, 0.01, 0.08);
    l.shared_rate = uniform(rng, 0.5, 1.5);
    l.shared_start = uniform(rng, 0.2, 0.5);
    dlat.push_back(l);
  }

  for (int d = 0; d < spec.n_datasets; ++d) {
    const auto& dl = dlat[static_cast<std::size_t>(d)];
    // Non-crossing datasets share one time grid so left-hold comparisons
    // happen at identical costs.
    Rng grid_rng = make_rng(spec.seed, {kTagDataset, static_cast<std::uint64_t>(d), 1});
    const std::vector<double> shared_time_grid =
        geometric_grid(T * uniform(grid_rng, 0.004, 0.01), T * uniform(grid_rng, 0.5, 0.9), n_anchor);

    for (int a = 0; a < spec.n_algorithms; ++a) {
      const auto& al = algos[static_cast<std::size_t>(a)];
      Rng rng = make_rng(spec.seed, {kTagCurve, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(a)});

      const double q = std::clamp(
          al.quality + dl.family_affinity[static_cast<std::size_t>(al.family)] + normal(rng, 0.06), 0.0, 1.0);
      CurveFamilyParams p;
      p.pmax = std::min(0.95, dl.base + dl.headroom * q);
      p.rate = al.rate;
      p.noise_sd = spec.noise_sd;
      switch (spec.scenario) {
        case Scenario::generic:
          p.p0 = p.pmax * uniform(rng, 0.15, 0.5);
          p.scale = T * (0.005 + 0.1 * al.capacity) * std::exp(normal(rng, 0.2));
          break;
        case Scenario::non_crossing:
          p.p0 = p.pmax * dl.shared_start;
          p.scale = dl.shared_scale;
          p.rate = dl.shared_rate;
          p.noise_sd = 0.0;
          break;
        case Scenario::frequent_crossing:
          if (al.capacity > 0.5) {
            p.crossing = true;
            p.p0 = p.pmax * uniform(rng, 0.02, 0.1);
            p.scale = T * uniform(rng, 0.15, 0.4);
          } else {
            p.pmax = std::min(0.95, dl.base + 0.6 * dl.headroom * q);
            p.p0 = p.pmax * uniform(rng, 0.6, 0.85);
            p.scale = T * uniform(rng, 0.003, 0.02);
          }
          break;
      }

      std::vector<double> costs;
      if (spec.curve_kind == CurveKind::size_indexed) {
        costs = parts.anchor_grid;
      } else if (non_crossing) {
        costs = shared_time_grid;
      } else {
        const double first = T * uniform(rng, 0.002, 0.01) * (1.0 + 2.0 * al.capacity);
        const double last = T * uniform(rng, 0.3, 1.0);
        costs = geometric_grid(first, std::max(last, first * 2.0), n_anchor);
        // Jitter interior anchors without breaking the ordering.
        for (std::size_t k = 1; k + 1 < costs.size(); ++k) {
          const double lo = costs[k - 1], hi = costs[k + 1];
          const double mid = costs[k];
          costs[k] = std::clamp(mid * std::exp(normal(rng, 0.1)), lo + (mid - lo) * 0.5, hi - (hi - mid) * 0.5);
        }
      }

      for (Split s : {Split::train, Split::valid, Split::test}) {
        Rng noise_rng = make_rng(spec.seed, {kTagSplit, static_cast<std::uint64_t>(d),
                                             static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(s)});
        std::vector<Anchor> anchors;
        anchors.reserve(costs.size());
        for (double c : costs) {
          double v = curve_family_value(p, c);
          if (s == Split::train) v += 0.05;
          if (non_crossing && s == Split::valid) v -= 0.01;
          v += normal(noise_rng, p.noise_sd);
          anchors.push_back({c, std::clamp(v, parts.score_min, parts.score_max)});
        }
        parts.curves.emplace(CurveKey{d, a, s}, LearningCurve(std::move(anchors)));
      }
    }
  }

  std::vector<int> ids(static_cast<std::size_t>(spec.n_datasets));
  std::iota(ids.begin(), ids.end(), 0);
  Rng split_rng = make_rng(spec.seed, {kTagDataset, 0xffffffffULL});
  std::shuffle(ids.begin(), ids.end(), split_rng);
  auto n_train = static_cast<std::size_t>(std::lround(spec.meta_train_fraction * spec.n_datasets));
  if (spec.n_datasets >= 2) n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
  parts.split.meta_train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  parts.split.meta_test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(parts.split.meta_train.begin(), parts.split.meta_train.end());
  std::sort(parts.split.meta_test.begin(), parts.split.meta_test.end());

  return MetaDataset(std::move(parts));
}

int crossing_count(const LearningCurve& a, const LearningCurve& b) {
  const double start = std::max(a.front().cost, b.front().cost);
  std::set<double> costs;
  for (const auto& x : a.anchors())
    if (x.cost >= start) costs.insert(x.cost);
  for (const auto& x : b.anchors())
    if (x.cost >= start) costs.insert(x.cost);
  int changes = 0;
  int prev_sign = 0;
  for (double c : costs) {
    const double diff = query_curve(a, c) - query_curve(b, c);
    const int sign = (diff > 0.0) - (diff < 0.0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) ++changes;
    prev_sign = sign;
  }
  return changes;
}

int crossing_count(const MetaDataset& md, int dataset) {
  md.dataset(dataset);
  int total = 0;
  const int n = static_cast<int>(md.num_algorithms());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      total += crossing_count(md.curve(dataset, i, Split::test), md.curve(dataset, j, Split::test));
  return total;
}

}  // namespace lcarena
