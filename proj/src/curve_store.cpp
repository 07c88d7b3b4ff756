#include "lcarena/curve_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lcarena/error.hpp"

namespace lcarena {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(CurveKind kind) {
  return kind == CurveKind::time_indexed ? "time_indexed" : "size_indexed";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

CurveKind curve_kind_from_string(std::string_view s) {
  if (s == "time_indexed") return CurveKind::time_indexed;
  if (s == "size_indexed") return CurveKind::size_indexed;
  throw Error("malformed_manifest", "unknown curve_kind '" + std::string(s) + "'");
}

std::string describe(const CurveKey& key) {
  return "(d" + std::to_string(key.dataset) + ", a" + std::to_string(key.algorithm) + ", " +
         std::string(to_string(key.split)) + ")";
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format", "cannot format double");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw Error("parse", "not a number: '" + std::string(text) + "'");
  return value;
}

// ---------------------------------------------------------------------------

LearningCurve::LearningCurve(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.empty()) throw Error("invalid_curve", "learning curve has no anchors");
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const auto& a = anchors_[i];
    if (!std::isfinite(a.cost) || a.cost < 0.0)
      throw Error("invalid_curve", "anchor cost must be finite and nonnegative");
    if (!std::isfinite(a.score)) throw Error("invalid_curve", "anchor score must be finite");
    if (i > 0 && !(a.cost > anchors_[i - 1].cost))
      throw Error("invalid_curve", "anchor costs must be strictly increasing");
  }
}

double query_curve(const LearningCurve& curve, double cost, double baseline) {
  const auto anchors = curve.anchors();
  // First anchor with cost > query; the one before it holds.
  auto it = std::upper_bound(anchors.begin(), anchors.end(), cost,
                             [](double c, const Anchor& a) { return c < a.cost; });
  if (it == anchors.begin()) return baseline;
  return std::prev(it)->score;
}

// ---------------------------------------------------------------------------

MetaDataset::MetaDataset(MetaDatasetParts parts)
    : score_min_(parts.score_min),
      score_max_(parts.score_max),
      baseline_score_(parts.baseline_score),
      curve_kind_(parts.curve_kind),
      anchor_grid_(std::move(parts.anchor_grid)),
      datasets_(std::move(parts.datasets)),
      algorithms_(std::move(parts.algorithms)),
      split_(std::move(parts.split)) {
  if (!(score_min_ < score_max_))
    throw Error("invalid_metadataset", "score_min must be below score_max");
  if (datasets_.empty()) throw Error("invalid_metadataset", "no datasets");
  if (algorithms_.empty()) throw Error("invalid_metadataset", "no algorithms");

  for (std::size_t i = 0; i < datasets_.size(); ++i) {
    const auto& d = datasets_[i];
    if (d.id != static_cast<int>(i))
      throw Error("invalid_metadataset", "dataset ids must be 0..n-1 in order (got " +
                                             std::to_string(d.id) + " at position " +
                                             std::to_string(i) + ")");
    if (!(d.total_budget > 0.0) || !std::isfinite(d.total_budget))
      throw Error("invalid_metadataset",
                  "dataset d" + std::to_string(d.id) + " total_budget must be positive");
    for (const auto& [name, v] : d.meta_features)
      if (!std::isfinite(v))
        throw Error("invalid_metadataset",
                    "dataset d" + std::to_string(d.id) + " meta-feature '" + name + "' not finite");
  }
  for (std::size_t i = 0; i < algorithms_.size(); ++i)
    if (algorithms_[i].id != static_cast<int>(i))
      throw Error("invalid_metadataset", "algorithm ids must be 0..n-1 in order");

  if (curve_kind_ == CurveKind::size_indexed) {
    if (anchor_grid_.empty())
      throw Error("invalid_metadataset", "size_indexed meta-dataset needs an anchor_grid");
    for (std::size_t i = 1; i < anchor_grid_.size(); ++i)
      if (!(anchor_grid_[i] > anchor_grid_[i - 1]))
        throw Error("invalid_metadataset", "anchor_grid must be strictly increasing");
  }

  std::set<int> train_ids(split_.meta_train.begin(), split_.meta_train.end());
  for (int id : split_.meta_test) {
    if (train_ids.count(id))
      throw Error("invalid_metadataset",
                  "dataset d" + std::to_string(id) + " is in both meta_train and meta_test");
  }
  for (const auto* ids : {&split_.meta_train, &split_.meta_test})
    for (int id : *ids)
      if (!has_dataset(id))
        throw Error("invalid_metadataset", "split references unknown dataset d" + std::to_string(id));

  const std::size_t expected = 3 * datasets_.size() * algorithms_.size();
  curves_.reserve(expected);
  for (int d = 0; d < static_cast<int>(datasets_.size()); ++d) {
    for (int a = 0; a < static_cast<int>(algorithms_.size()); ++a) {
      for (Split s : {Split::train, Split::valid, Split::test}) {
        const CurveKey key{d, a, s};
        auto it = parts.curves.find(key);
        if (it == parts.curves.end()) throw Error("missing_curve", "missing curve " + describe(key));
        const auto& curve = it->second;
        for (const auto& anchor : curve.anchors()) {
          if (anchor.score < score_min_ || anchor.score > score_max_)
            throw Error("invalid_curve", "score out of range in curve " + describe(key));
        }
        if (curve_kind_ == CurveKind::size_indexed) {
          const auto anchors = curve.anchors();
          const bool on_grid =
              anchors.size() == anchor_grid_.size() &&
              std::equal(anchors.begin(), anchors.end(), anchor_grid_.begin(),
                         [](const Anchor& x, double c) { return x.cost == c; });
          if (!on_grid)
            throw Error("invalid_curve", "size_indexed curve " + describe(key) +
                                             " does not match the anchor grid");
        }
        curves_.push_back(curve);
      }
    }
  }
  if (parts.curves.size() != expected)
    throw Error("invalid_metadataset", "unexpected extra curves: have " +
                                           std::to_string(parts.curves.size()) + ", expected " +
                                           std::to_string(expected));
}

const DatasetSpec& MetaDataset::dataset(int id) const {
  if (!has_dataset(id)) throw Error("unknown_dataset", "unknown dataset d" + std::to_string(id));
  return datasets_[static_cast<std::size_t>(id)];
}

const AlgorithmSpec& MetaDataset::algorithm(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= algorithms_.size())
    throw Error("unknown_algorithm", "unknown algorithm a" + std::to_string(id));
  return algorithms_[static_cast<std::size_t>(id)];
}

const LearningCurve& MetaDataset::curve(int dataset, int algorithm, Split split) const {
  if (!has_dataset(dataset) || algorithm < 0 ||
      static_cast<std::size_t>(algorithm) >= algorithms_.size())
    throw Error("unknown_curve", "no curve " + describe({dataset, algorithm, split}));
  const std::size_t idx =
      (static_cast<std::size_t>(dataset) * algorithms_.size() + static_cast<std::size_t>(algorithm)) * 3 +
      static_cast<std::size_t>(split);
  return curves_[idx];
}

std::vector<int> rank_descending(std::span<const double> scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  std::vector<int> ranks(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r) + 1;
  return ranks;
}

std::vector<int> final_rank(const MetaDataset& md, int dataset) {
  md.dataset(dataset);
  std::vector<double> last(md.num_algorithms());
  for (std::size_t a = 0; a < last.size(); ++a)
    last[a] = md.curve(dataset, static_cast<int>(a), Split::test).back().score;
  return rank_descending(last);
}

// ---------------------------------------------------------------------------
// Manifest I/O

namespace {

std::string curve_file_name(const CurveKey& key) {
  return "d" + std::to_string(key.dataset) + "_a" + std::to_string(key.algorithm) + "_" +
         std::string(to_string(key.split)) + ".csv";
}

json hyper_to_json(const std::map<std::string, HyperValue>& hp) {
  json out = json::object();
  for (const auto& [name, value] : hp) {
    if (const auto* d = std::get_if<double>(&value))
      out[name] = *d;
    else
      out[name] = std::get<std::string>(value);
  }
  return out;
}

template <typename T>
T required(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field))
    throw Error("malformed_manifest", where + ": missing field '" + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw Error("malformed_manifest", where + ": bad field '" + field + "': " + e.what());
  }
}

LearningCurve read_curve_csv(const fs::path& path, const CurveKey& key) {
  std::ifstream in(path);
  if (!in) throw Error("missing_curve", "missing curve file for " + describe(key) + ": " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed_curve", "empty curve file for " + describe(key));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "cost,score")
    throw Error("malformed_curve", "curve " + describe(key) + " must start with header 'cost,score'");
  std::vector<Anchor> anchors;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error("malformed_curve", "curve " + describe(key) + ": bad row '" + line + "'");
    try {
      anchors.push_back({parse_double(std::string_view(line).substr(0, comma)),
                         parse_double(std::string_view(line).substr(comma + 1))});
    } catch (const Error& e) {
      throw Error("malformed_curve", "curve " + describe(key) + ": " + e.what());
    }
  }
  try {
    return LearningCurve(std::move(anchors));
  } catch (const Error& e) {
    throw Error(e.code(), "curve " + describe(key) + ": " + e.what());
  }
}

}  // namespace

void save_metadataset(const MetaDataset& md, const fs::path& manifest) {
  const fs::path root = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
  const fs::path curves_dir = root / "curves";
  fs::create_directories(curves_dir);

  json j;
  j["score_min"] = md.score_min();
  j["score_max"] = md.score_max();
  j["baseline_score"] = md.baseline_score();
  j["curve_kind"] = std::string(to_string(md.curve_kind()));
  if (md.curve_kind() == CurveKind::size_indexed)
    j["anchor_grid"] = std::vector<double>(md.anchor_grid().begin(), md.anchor_grid().end());
  j["datasets"] = json::array();
  for (const auto& d : md.datasets()) {
    json meta = json::object();
    for (const auto& [k, v] : d.meta_features) meta[k] = v;
    j["datasets"].push_back(
        {{"id", d.id}, {"name", d.name}, {"total_budget", d.total_budget}, {"meta_features", meta}});
  }
  j["algorithms"] = json::array();
  for (const auto& a : md.algorithms())
    j["algorithms"].push_back(
        {{"id", a.id}, {"family", a.family}, {"hyperparameters", hyper_to_json(a.hyperparameters)}});
  j["split"] = {{"meta_train", md.split().meta_train}, {"meta_test", md.split().meta_test}};
  j["curves"] = "curves";

  for (int d = 0; d < static_cast<int>(md.num_datasets()); ++d) {
    for (int a = 0; a < static_cast<int>(md.num_algorithms()); ++a) {
      for (Split s : {Split::train, Split::valid, Split::test}) {
        const CurveKey key{d, a, s};
        std::ofstream out(curves_dir / curve_file_name(key), std::ios::binary);
        if (!out) throw Error("io", "cannot write curve file for " + describe(key));
        out << "cost,score\n";
        for (const auto& anchor : md.curve(d, a, s).anchors())
          out << format_double(anchor.cost) << ',' << format_double(anchor.score) << '\n';
      }
    }
  }

  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw Error("io", "cannot write manifest " + manifest.string());
  out << j.dump(2) << '\n';
}

MetaDataset load_metadataset(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("unreadable_manifest", "cannot read manifest " + manifest.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed_manifest", std::string("manifest is not valid JSON: ") + e.what());
  }

  MetaDatasetParts parts;
  parts.score_min = required<double>(j, "score_min", "manifest");
  parts.score_max = required<double>(j, "score_max", "manifest");
  parts.baseline_score = required<double>(j, "baseline_score", "manifest");
  parts.curve_kind = curve_kind_from_string(required<std::string>(j, "curve_kind", "manifest"));
  if (j.contains("anchor_grid")) parts.anchor_grid = required<std::vector<double>>(j, "anchor_grid", "manifest");

  for (const auto& dj : required<json>(j, "datasets", "manifest")) {
    DatasetSpec d;
    d.id = required<int>(dj, "id", "dataset");
    const std::string where = "dataset d" + std::to_string(d.id);
    d.name = required<std::string>(dj, "name", where);
    d.total_budget = required<double>(dj, "total_budget", where);
    d.meta_features = required<std::map<std::string, double>>(dj, "meta_features", where);
    parts.datasets.push_back(std::move(d));
  }
  for (const auto& aj : required<json>(j, "algorithms", "manifest")) {
    AlgorithmSpec a;
    a.id = required<int>(aj, "id", "algorithm");
    const std::string where = "algorithm a" + std::to_string(a.id);
    a.family = required<std::string>(aj, "family", where);
    const json hyper = required<json>(aj, "hyperparameters", where);
    for (const auto& [name, value] : hyper.items()) {
      if (value.is_number())
        a.hyperparameters[name] = value.get<double>();
      else if (value.is_string())
        a.hyperparameters[name] = value.get<std::string>();
      else
        throw Error("malformed_manifest", where + ": hyperparameter '" + name + "' must be number or string");
    }
    parts.algorithms.push_back(std::move(a));
  }
  const auto split = required<json>(j, "split", "manifest");
  parts.split.meta_train = required<std::vector<int>>(split, "meta_train", "split");
  parts.split.meta_test = required<std::vector<int>>(split, "meta_test", "split");

  const fs::path root = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
  const fs::path curves_dir = root / required<std::string>(j, "curves", "manifest");
  for (const auto& d : parts.datasets) {
    for (const auto& a : parts.algorithms) {
      for (Split s : {Split::train, Split::valid, Split::test}) {
        const CurveKey key{d.id, a.id, s};
        parts.curves.emplace(key, read_curve_csv(curves_dir / curve_file_name(key), key));
      }
    }
  }
  return MetaDataset(std::move(parts));
}

}  // namespace lcarena
