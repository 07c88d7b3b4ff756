#pragma once

// Learning curves, meta-datasets and their on-disk manifest format.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lcarena {

enum class CurveKind { time_indexed, size_indexed };
enum class Split { train = 0, valid = 1, test = 2 };

std::string_view to_string(CurveKind kind);
std::string_view to_string(Split split);
CurveKind curve_kind_from_string(std::string_view s);

struct Anchor {
  double cost = 0.0;
  double score = 0.0;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Step function over cost, defined by anchors with strictly increasing cost.
class LearningCurve {
 public:
  /// Throws Error("invalid_curve") when anchors are empty, have a negative
  /// or non-finite cost, or costs are not strictly increasing.
  explicit LearningCurve(std::vector<Anchor> anchors);

  std::span<const Anchor> anchors() const noexcept { return anchors_; }
  std::size_t size() const noexcept { return anchors_.size(); }
  const Anchor& front() const noexcept { return anchors_.front(); }
  const Anchor& back() const noexcept { return anchors_.back(); }

  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;

 private:
  std::vector<Anchor> anchors_;
};

/// Score of the last anchor whose cost is <= `cost` (left-hold). Below the
/// first anchor nothing has been trained yet and `baseline` is returned.
double query_curve(const LearningCurve& curve, double cost, double baseline = 0.0);

using HyperValue = std::variant<double, std::string>;

struct AlgorithmSpec {
  int id = 0;
  std::string family;
  std::map<std::string, HyperValue> hyperparameters;
  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

struct DatasetSpec {
  int id = 0;
  std::string name;
  std::map<std::string, double> meta_features;
  double total_budget = 1.0;
  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct DataSplit {
  std::vector<int> meta_train;
  std::vector<int> meta_test;
  friend bool operator==(const DataSplit&, const DataSplit&) = default;
};

struct CurveKey {
  int dataset = 0;
  int algorithm = 0;
  Split split = Split::train;
  auto operator<=>(const CurveKey&) const = default;
};

std::string describe(const CurveKey& key);

/// Everything needed to assemble a MetaDataset; validated on construction.
struct MetaDatasetParts {
  double score_min = 0.0;
  double score_max = 1.0;
  double baseline_score = 0.0;
  CurveKind curve_kind = CurveKind::time_indexed;
  // Shared anchor costs of every size-indexed curve; empty for time-indexed.
  std::vector<double> anchor_grid;
  std::vector<DatasetSpec> datasets;
  std::vector<AlgorithmSpec> algorithms;
  std::map<CurveKey, LearningCurve> curves;
  DataSplit split;
};

/// Immutable collection of datasets x algorithms x {train, valid, test}
/// curves. Dataset and algorithm ids are dense indices 0..n-1.
class MetaDataset {
 public:
  /// Validates every invariant; throws Error naming the offending key.
  explicit MetaDataset(MetaDatasetParts parts);

  double score_min() const noexcept { return score_min_; }
  double score_max() const noexcept { return score_max_; }
  double baseline_score() const noexcept { return baseline_score_; }
  CurveKind curve_kind() const noexcept { return curve_kind_; }
  std::span<const double> anchor_grid() const noexcept { return anchor_grid_; }

  std::span<const DatasetSpec> datasets() const noexcept { return datasets_; }
  std::span<const AlgorithmSpec> algorithms() const noexcept { return algorithms_; }
  const DatasetSpec& dataset(int id) const;
  const AlgorithmSpec& algorithm(int id) const;
  const DataSplit& split() const noexcept { return split_; }

  std::size_t num_datasets() const noexcept { return datasets_.size(); }
  std::size_t num_algorithms() const noexcept { return algorithms_.size(); }
  std::size_t num_curves() const noexcept { return curves_.size(); }

  bool has_dataset(int id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < datasets_.size();
  }

  const LearningCurve& curve(int dataset, int algorithm, Split split) const;

  friend bool operator==(const MetaDataset&, const MetaDataset&) = default;

 private:
  double score_min_;
  double score_max_;
  double baseline_score_;
  CurveKind curve_kind_;
  std::vector<double> anchor_grid_;
  std::vector<DatasetSpec> datasets_;
  std::vector<AlgorithmSpec> algorithms_;
  // Indexed ((dataset * n_algorithms) + algorithm) * 3 + split.
  std::vector<LearningCurve> curves_;
  DataSplit split_;
};

/// Ranks (1 = best) indexed by algorithm id, by descending last-anchor test
/// score; ties go to the lower id.
std::vector<int> final_rank(const MetaDataset& md, int dataset);

/// Same ordering rule applied to arbitrary scores.
std::vector<int> rank_descending(std::span<const double> scores);

/// Writes `manifest` plus a `curves/` directory next to it.
void save_metadataset(const MetaDataset& md, const std::filesystem::path& manifest);
MetaDataset load_metadataset(const std::filesystem::path& manifest);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace lcarena
