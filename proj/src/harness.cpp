#include "lcarena/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "lcarena/agent_factory.hpp"
#include "lcarena/error.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Guards against agents that never exhaust the budget.
constexpr int kMaxSteps = 1'000'000;

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string trajectory_stem(const EpisodeTrajectory& t) {
  return t.agent + "_d" + std::to_string(t.dataset) + "_s" + std::to_string(t.seed) + "_r" +
         std::to_string(t.run);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  return out;
}

// Runs job(i) for i in [0, n) on `workers` threads; rethrows the first error.
template <typename Job>
void parallel_for(std::size_t n, int workers, Job job) {
  const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, 64));
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

EpisodeTrajectory run_episode(Agent& agent, const MetaDataset& md, int dataset, const EpisodeConfig& cfg,
                              std::uint64_t seed, int run) {
  Environment env(md, cfg.reveal);
  Observation obs = env.reset(dataset, cfg.reward);
  agent.reset(obs, substream_seed(seed, {static_cast<std::uint64_t>(dataset), static_cast<std::uint64_t>(run)}));

  EpisodeTrajectory traj;
  traj.agent = agent.name();
  traj.dataset = dataset;
  traj.seed = seed;
  traj.run = run;
  traj.baseline = cfg.reward.baseline_score;

  std::vector<double> rewards;
  double fixed = -std::numeric_limits<double>::infinity();
  while (!env.done()) {
    if (static_cast<int>(traj.steps.size()) >= kMaxSteps)
      throw Error("runaway_episode", agent.name() + " did not exhaust the budget on d" + std::to_string(dataset));
    const Action action = agent.act(obs);
    StepResult res = env.step(action);
    const auto& progress = res.observation.algorithms[static_cast<std::size_t>(action.algo)];
    StepRecord rec;
    rec.t = static_cast<int>(traj.steps.size());
    rec.action = action;
    rec.charged = res.charged;
    rec.t_tilde = res.observation.t_tilde;
    rec.reward = res.reward;
    rec.revealed_train = progress.train.back().score;
    rec.revealed_valid = progress.valid.back().score;
    rec.best_test = env.current_best_test();
    traj.steps.push_back(rec);
    rewards.push_back(res.reward);
    fixed = std::max(fixed, rec.best_test);
    obs = std::move(res.observation);
  }
  traj.alc = accumulated_alc(rewards);
  traj.fixed_time = fixed;
  return traj;
}

std::vector<AgentAggregate> aggregate(std::span<const ReportEntry> entries) {
  std::map<std::string, std::vector<const ReportEntry*>> by_agent;
  for (const auto& e : entries) by_agent[e.agent].push_back(&e);

  std::vector<AgentAggregate> out;
  for (const auto& [agent, list] : by_agent) {
    AgentAggregate a;
    a.agent = agent;
    std::map<std::uint64_t, std::vector<const ReportEntry*>> by_seed;
    std::set<int> datasets;
    for (const auto* e : list) {
      by_seed[e->seed].push_back(e);
      datasets.insert(e->dataset);
    }
    a.n_datasets = datasets.size();
    std::map<std::uint64_t, std::pair<std::vector<double>, std::vector<double>>> values;
    for (const auto& [seed, es] : by_seed) {
      auto& [alcs, fixeds] = values[seed];
      for (const auto* e : es) {
        alcs.push_back(e->alc);
        fixeds.push_back(e->fixed_time);
      }
      a.seeds.push_back(seed);
      a.seed_mean_alc.push_back(mean(alcs));
      a.seed_mean_fixed.push_back(mean(fixeds));
    }
    const auto worst_alc = static_cast<std::size_t>(
        std::min_element(a.seed_mean_alc.begin(), a.seed_mean_alc.end()) - a.seed_mean_alc.begin());
    const auto worst_fixed = static_cast<std::size_t>(
        std::min_element(a.seed_mean_fixed.begin(), a.seed_mean_fixed.end()) - a.seed_mean_fixed.begin());
    a.worst_seed = a.seeds[worst_alc];
    a.worst_seed_mean_alc = a.seed_mean_alc[worst_alc];
    a.worst_seed_mean_fixed = a.seed_mean_fixed[worst_fixed];
    a.std_alc = sample_std(values[a.seeds[worst_alc]].first);
    a.std_fixed = sample_std(values[a.seeds[worst_fixed]].second);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<int> evaluation_datasets(const MetaDataset& md, const HarnessConfig& cfg) {
  std::vector<int> ids = md.split().meta_test;
  if (!cfg.feedback_final_split) return ids;
  const auto half = (ids.size() + 1) / 2;
  if (cfg.final_phase) return {ids.begin() + static_cast<std::ptrdiff_t>(half), ids.end()};
  return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(half)};
}

RunReport run_meta_test(const Agent& agent, const MetaDataset& md, const HarnessConfig& cfg) {
  if (!agent.ready())
    throw Error("not_meta_trained", agent.name() + " requires meta-training before evaluation");
  if (cfg.seeds.empty()) throw Error("invalid_config", "at least one seed is required");
  const int runs = cfg.internal_runs > 0 ? cfg.internal_runs : default_internal_runs(agent.name());
  const auto datasets = evaluation_datasets(md, cfg);
  if (datasets.empty()) throw Error("empty_meta_test", "no meta-test datasets to evaluate");

  std::vector<EpisodeKey> jobs;
  for (auto seed : cfg.seeds)
    for (int d : datasets)
      for (int r = 0; r < runs; ++r) jobs.push_back({d, seed, r});

  std::vector<EpisodeTrajectory> trajectories(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    auto local = agent.clone();
    trajectories[i] = run_episode(*local, md, jobs[i].dataset, cfg.episode, jobs[i].seed, jobs[i].run);
  });

  RunReport report;
  report.agent = agent.name();
  report.meta_trained = agent.requires_meta_train();
  for (std::size_t i = 0; i < jobs.size(); i += static_cast<std::size_t>(runs)) {
    ReportEntry e{agent.name(), jobs[i].dataset, jobs[i].seed, 0.0, 0.0};
    for (int r = 0; r < runs; ++r) {
      e.alc += trajectories[i + static_cast<std::size_t>(r)].alc;
      e.fixed_time += trajectories[i + static_cast<std::size_t>(r)].fixed_time;
    }
    e.alc /= runs;
    e.fixed_time /= runs;
    report.entries.push_back(e);
  }
  report.trajectories = std::move(trajectories);
  return report;
}

MetaTrainResult run_meta_train(Agent& agent, const MetaDataset& md, const EpisodeConfig& cfg) {
  if (md.split().meta_train.empty()) throw Error("empty_meta_train", "meta-train split is empty");
  MetaTrainResult result;
  if (!agent.requires_meta_train()) return result;
  agent.meta_train(md, md.split().meta_train, MetaTrainContext{cfg.reward, cfg.reveal});
  result.meta_trained = true;
  result.losses = agent.training_losses();
  result.checkpoint = agent.checkpoint();
  return result;
}

std::string_view to_string(AblationKind kind) {
  return kind == AblationKind::no_meta_train ? "no_meta_train" : "last_point_only";
}

AblationKind ablation_kind_from_string(std::string_view s) {
  if (s == "no_meta_train") return AblationKind::no_meta_train;
  if (s == "last_point_only") return AblationKind::last_point_only;
  throw Error("unknown_ablation", "unknown ablation kind '" + std::string(s) + "'");
}

std::vector<EpisodeKey> episode_schedule(const RunReport& report) {
  std::vector<EpisodeKey> keys;
  for (const auto& t : report.trajectories) keys.push_back({t.dataset, t.seed, t.run});
  return keys;
}

AblationResult run_ablation(AblationKind kind, const DdqnConfig& ddqn, const MetaDataset& md,
                            const HarnessConfig& cfg) {
  const std::string ablated_name = "ddqn_" + std::string(to_string(kind));
  AblationResult result;
  result.full.agent = "ddqn";
  result.full.meta_trained = true;
  result.ablated.agent = ablated_name;
  result.ablated.meta_trained = kind != AblationKind::no_meta_train;

  auto append = [](RunReport& into, RunReport&& from, const std::string& name) {
    for (auto& e : from.entries) {
      e.agent = name;
      into.entries.push_back(std::move(e));
    }
    for (auto& t : from.trajectories) {
      t.agent = name;
      into.trajectories.push_back(std::move(t));
    }
  };

  for (auto seed : cfg.seeds) {
    HarnessConfig per_seed = cfg;
    per_seed.seeds = {seed};
    DdqnConfig seeded = ddqn;
    seeded.seed = seed;

    DdqnAgent full(seeded);
    run_meta_train(full, md, cfg.episode);
    append(result.full, run_meta_test(full, md, per_seed), "ddqn");

    if (kind == AblationKind::no_meta_train) {
      DdqnConfig untrained = seeded;
      untrained.allow_untrained = true;
      DdqnAgent ablated(untrained);
      append(result.ablated, run_meta_test(ablated, md, per_seed), ablated_name);
    } else {
      HarnessConfig last_point = per_seed;
      last_point.episode.reveal = RevealMode::last_point_only;
      DdqnAgent ablated(seeded);
      run_meta_train(ablated, md, last_point.episode);
      append(result.ablated, run_meta_test(ablated, md, last_point), ablated_name);
    }
  }
  return result;
}

TrajectorySummary analyze_trajectory(const EpisodeTrajectory& trajectory, std::span<const AlgorithmSpec> algorithms) {
  TrajectorySummary s;
  auto family = [&](int algo) {
    if (algo >= 0 && static_cast<std::size_t>(algo) < algorithms.size())
      return algorithms[static_cast<std::size_t>(algo)].family;
    return "a" + std::to_string(algo);
  };
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    const int algo = trajectory.steps[i].action.algo;
    ++s.family_occupancy[family(algo)];
    if (i > 0 && trajectory.steps[i - 1].action.algo != algo)
      s.transitions.push_back({static_cast<int>(i), trajectory.steps[i - 1].action.algo, algo});
  }
  s.switch_count = static_cast<int>(s.transitions.size());
  return s;
}

ComparisonTable compare_reports(std::span<const ReportEntry> entries) {
  ComparisonTable table;
  std::map<std::string, std::map<int, std::vector<double>>> per_dataset;
  for (const auto& e : entries) per_dataset[e.agent][e.dataset].push_back(e.alc);

  std::optional<std::set<int>> reference;
  for (const auto& [agent, by_dataset] : per_dataset) {
    std::set<int> ids;
    for (const auto& [d, v] : by_dataset) ids.insert(d);
    if (!reference) {
      reference = ids;
    } else if (*reference != ids) {
      throw Error("inconsistent_reports", "agent '" + agent + "' covers a different set of datasets");
    }
  }
  if (reference) table.datasets.assign(reference->begin(), reference->end());

  for (auto& agg : aggregate(entries)) {
    ComparisonRow row;
    std::vector<double> alcs, fixeds;
    for (const auto& e : entries)
      if (e.agent == agg.agent) {
        alcs.push_back(e.alc);
        fixeds.push_back(e.fixed_time);
      }
    row.mean_alc = mean(alcs);
    row.mean_fixed = mean(fixeds);
    row.aggregate = std::move(agg);
    table.rows.push_back(std::move(row));
  }

  for (const auto& [a, da] : per_dataset) {
    for (const auto& [b, db] : per_dataset) {
      if (a == b) continue;
      int wins = 0;
      for (int d : table.datasets)
        if (mean(da.at(d)) > mean(db.at(d))) ++wins;
      table.wins[a][b] = wins;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------

json trajectory_step_json(const StepRecord& s) {
  return {{"t", s.t},
          {"algo", s.action.algo},
          {"delta", s.action.delta},
          {"charged", s.charged},
          {"t_tilde", s.t_tilde},
          {"reward", s.reward},
          {"revealed_train", s.revealed_train},
          {"revealed_valid", s.revealed_valid},
          {"predicted_best", s.action.predicted_best},
          {"best_test", s.best_test}};
}

json to_json(const AgentAggregate& a) {
  return {{"agent", a.agent},
          {"n_datasets", a.n_datasets},
          {"seeds", a.seeds},
          {"seed_mean_alc", a.seed_mean_alc},
          {"seed_mean_fixed_time", a.seed_mean_fixed},
          {"worst_seed", a.worst_seed},
          {"worst_seed_mean_alc", a.worst_seed_mean_alc},
          {"worst_seed_mean_fixed_time", a.worst_seed_mean_fixed},
          {"std_alc", a.std_alc},
          {"std_fixed_time", a.std_fixed}};
}

json to_json(const ComparisonTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json j = to_json(r.aggregate);
    j["mean_alc"] = r.mean_alc;
    j["mean_fixed_time"] = r.mean_fixed;
    rows.push_back(j);
  }
  return {{"schema", "lc-arena/comparison/1"}, {"datasets", t.datasets}, {"agents", rows}, {"wins", t.wins}};
}

void write_run_report(const RunReport& report, const fs::path& dir) {
  fs::create_directories(dir / "trajectories");
  fs::create_directories(dir / "plots");

  {
    auto out = open_out(dir / "report.csv");
    out << "agent,dataset,seed,alc,fixed_time\n";
    for (const auto& e : report.entries)
      out << e.agent << ',' << e.dataset << ',' << e.seed << ',' << format_double(e.alc) << ','
          << format_double(e.fixed_time) << '\n';
  }
  {
    json aggs = json::array();
    for (const auto& a : aggregate(report.entries)) aggs.push_back(to_json(a));
    json j = {{"schema", "lc-arena/report/1"},
              {"agent", report.agent},
              {"meta_trained", report.meta_trained},
              {"episodes", report.trajectories.size()},
              {"aggregates", aggs}};
    if (!report.meta_trained) j["note"] = "no meta-training";
    auto out = open_out(dir / "report.json");
    out << j.dump(2) << '\n';
  }
  for (const auto& t : report.trajectories) {
    auto out = open_out(dir / "trajectories" / (trajectory_stem(t) + ".jsonl"));
    for (const auto& s : t.steps) {
      json line = trajectory_step_json(s);
      line["agent"] = t.agent;
      line["dataset"] = t.dataset;
      line["seed"] = t.seed;
      line["run"] = t.run;
      out << line.dump() << '\n';
    }
    // Predicted-best test performance over normalized time, as a step series.
    auto plot = open_out(dir / "plots" / (trajectory_stem(t) + ".csv"));
    plot << "x,y\n" << format_double(0.0) << ',' << format_double(t.baseline) << '\n';
    for (const auto& s : t.steps) plot << format_double(s.t_tilde) << ',' << format_double(s.best_test) << '\n';
  }
  {
    std::map<std::string, std::map<int, std::vector<double>>> by;
    for (const auto& e : report.entries) by[e.agent][e.dataset].push_back(e.alc);
    for (const auto& [agent, per_dataset] : by) {
      auto plot = open_out(dir / "plots" / ("alc_by_dataset_" + agent + ".csv"));
      plot << "x,y\n";
      for (const auto& [d, v] : per_dataset) plot << d << ',' << format_double(mean(v)) << '\n';
    }
  }
}

std::vector<ReportEntry> read_report_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable_report", "cannot read report " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "agent,dataset,seed,alc,fixed_time")
    throw Error("malformed_report", path.string() + ": unexpected header '" + line + "'");
  std::vector<ReportEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 5) throw Error("malformed_report", path.string() + ": bad row '" + line + "'");
    try {
      out.push_back({cols[0], std::stoi(cols[1]), std::stoull(cols[2]), parse_double(cols[3]), parse_double(cols[4])});
    } catch (const std::exception& e) {
      throw Error("malformed_report", path.string() + ": bad row '" + line + "'");
    }
  }
  return out;
}

EpisodeTrajectory read_trajectory_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable_trajectory", "cannot read trajectory " + path.string());
  EpisodeTrajectory t;
  std::string line;
  bool first = true;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (first) {
        t.agent = j.value("agent", "");
        t.dataset = j.value("dataset", 0);
        t.seed = j.value("seed", std::uint64_t{0});
        t.run = j.value("run", 0);
        first = false;
      }
      StepRecord s;
      s.t = j.at("t").get<int>();
      s.action = {j.at("algo").get<int>(), j.at("delta").get<double>(), j.at("predicted_best").get<int>()};
      s.charged = j.at("charged").get<double>();
      s.t_tilde = j.at("t_tilde").get<double>();
      s.reward = j.at("reward").get<double>();
      s.revealed_train = j.at("revealed_train").get<double>();
      s.revealed_valid = j.at("revealed_valid").get<double>();
      s.best_test = j.value("best_test", 0.0);
      t.steps.push_back(s);
    }
  } catch (const json::exception& e) {
    throw Error("malformed_trajectory", path.string() + ": " + e.what());
  }
  double alc = 0.0, fixed = -std::numeric_limits<double>::infinity();
  for (const auto& s : t.steps) {
    alc += s.reward;
    fixed = std::max(fixed, s.best_test);
  }
  t.alc = alc;
  t.fixed_time = t.steps.empty() ? 0.0 : fixed;
  return t;
}

void write_comparison(const ComparisonTable& table, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "comparison.csv");
    out << "agent,n_datasets,mean_alc,worst_seed_mean_alc,std_alc,mean_fixed_time,worst_seed_mean_fixed_time,"
           "std_fixed_time\n";
    for (const auto& r : table.rows) {
      const auto& a = r.aggregate;
      out << a.agent << ',' << a.n_datasets << ',' << format_double(r.mean_alc) << ','
          << format_double(a.worst_seed_mean_alc) << ',' << format_double(a.std_alc) << ','
          << format_double(r.mean_fixed) << ',' << format_double(a.worst_seed_mean_fixed) << ','
          << format_double(a.std_fixed) << '\n';
    }
  }
  {
    auto out = open_out(dir / "wins.csv");
    out << "agent,opponent,wins,datasets\n";
    for (const auto& [a, row] : table.wins)
      for (const auto& [b, w] : row) out << a << ',' << b << ',' << w << ',' << table.datasets.size() << '\n';
  }
  auto out = open_out(dir / "comparison.json");
  out << to_json(table).dump(2) << '\n';
}

}  // namespace lcarena
