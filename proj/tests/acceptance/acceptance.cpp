// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lcarena/baselines.hpp"
#include "lcarena/ddqn.hpp"
#include "lcarena/environment.hpp"
#include "lcarena/freeze_thaw.hpp"
#include "lcarena/harness.hpp"
#include "lcarena/synth.hpp"
#include "lcarena/value_net.hpp"

namespace {

using namespace lcarena;
namespace fs = std::filesystem;

// Tolerances.
constexpr double kRewardTol = 1e-12;
constexpr double kAlcTol = 1e-9;
constexpr double kBudgetRelTol = 1e-9;
constexpr double kGradRelTol = 1e-4;
constexpr double kFdStep = 1e-5;
constexpr double kKinkGuard = 1e-4;
constexpr double kNatsTol = 0.02;
constexpr int kUniformSlack = 150;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// ----------------------------------------------------------------------- 1

Outcome reward_math() {
  struct Case {
    double spent, total, sigma, expected;
  };
  // Closed forms evaluated independently of normalized_time().
  const std::vector<Case> t_cases = {
      {0.0, 100.0, 20.0, 0.0},
      {100.0, 100.0, 20.0, 1.0},
      {50.0, 100.0, 20.0, std::log(3.5) / std::log(6.0)},
      {1.0, 2.0, 1.0, std::log(2.0) / std::log(3.0)},
      {10.0, 100.0, 10.0, std::log(2.0) / std::log(11.0)},
      {3.0, 7.0, 0.5, std::log(7.0) / std::log(15.0)},
  };
  struct RCase {
    double prev, next, t, expected;
  };
  const std::vector<RCase> r_cases = {
      {0.5, 0.5, 0.3, 0.0}, {0.5, 0.7, 0.25, 0.15}, {0.7, 0.6, 0.5, -0.05},
      {0.0, 0.6, std::log(2.0) / std::log(3.0), 0.6 * (1 - std::log(2.0) / std::log(3.0))},
      {0.2, 0.9, 1.0, 0.0}, {0.1, 0.4, 0.0, 0.3},
  };
  double worst = 0.0;
  for (const auto& c : t_cases) worst = std::max(worst, std::abs(normalized_time(c.spent, c.total, c.sigma) - c.expected));
  for (const auto& c : r_cases) worst = std::max(worst, std::abs(reward(c.prev, c.next, c.t) - c.expected));
  const bool ok = worst <= kRewardTol && normalized_time(0, 5, 1) == 0.0 && normalized_time(5, 5, 1) == 1.0;
  return {ok, std::to_string(t_cases.size() + r_cases.size()) + " cases, max abs error " + fmt(worst)};
}

// ----------------------------------------------------------------------- 2

double step_integral(const std::vector<std::pair<double, double>>& jumps, double baseline) {
  double area = 0.0, level = baseline, t = 0.0;
  for (const auto& [tt, v] : jumps) {
    area += (tt - t) * level;
    t = tt;
    level = v;
  }
  return area + (1.0 - t) * level - baseline;
}

Outcome alc_identity() {
  GenSpec spec;
  spec.n_datasets = 10;
  spec.n_algorithms = 8;
  spec.seed = 2024;
  const auto md = generate(spec);
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int ep = 0; ep < 100; ++ep) {
    const int d = ep % 10;
    const double total = md.dataset(d).total_budget;
    std::uniform_real_distribution<double> u(0.002 * total, 0.25 * total);
    Environment env(md);
    RewardConfig cfg;
    cfg.baseline_score = (ep % 3) * 0.05;
    env.reset(d, cfg);
    std::vector<double> rewards;
    std::vector<std::pair<double, double>> jumps;
    while (!env.done()) {
      const auto r = env.step({static_cast<int>(rng() % 8), u(rng), static_cast<int>(rng() % 8)});
      rewards.push_back(r.reward);
      jumps.emplace_back(r.observation.t_tilde, env.current_best_test());
    }
    worst = std::max(worst, std::abs(accumulated_alc(rewards) - step_integral(jumps, cfg.baseline_score)));
  }
  return {worst <= kAlcTol, "100 episodes, max |sum r - integral| " + fmt(worst)};
}

// ----------------------------------------------------------------------- 3

void collect_numbers(const nlohmann::json& j, std::vector<std::string>& strings, std::vector<double>& numbers) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      strings.push_back(k);
      collect_numbers(v, strings, numbers);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_numbers(v, strings, numbers);
  } else if (j.is_number()) {
    numbers.push_back(j.get<double>());
  } else if (j.is_string()) {
    strings.push_back(j.get<std::string>());
  }
}

Outcome hidden_test_and_budget() {
  std::vector<MetaDataset> mds;
  for (Scenario sc : {Scenario::generic, Scenario::non_crossing, Scenario::frequent_crossing})
    for (CurveKind kind : {CurveKind::time_indexed, CurveKind::size_indexed}) {
      GenSpec spec;
      spec.n_datasets = 6;
      spec.n_algorithms = 5;
      spec.scenario = sc;
      spec.curve_kind = kind;
      spec.seed = 31;
      mds.push_back(generate(spec));
    }
  long observations = 0, leaks = 0, episodes = 0, budget_violations = 0;
  double worst_budget = 0.0;
  for (const auto& md : mds) {
    std::set<double> hidden, visible;
    for (int d = 0; d < static_cast<int>(md.num_datasets()); ++d)
      for (int a = 0; a < static_cast<int>(md.num_algorithms()); ++a) {
        for (const auto& p : md.curve(d, a, Split::test).anchors()) hidden.insert(p.score);
        for (Split s : {Split::train, Split::valid})
          for (const auto& p : md.curve(d, a, s).anchors()) visible.insert(p.score);
      }
    AvgRankAgent avg;
    avg.meta_train(md, md.split().meta_train, {});
    DdqnAgent ddqn(DdqnConfig{.hidden = {16}, .batch_size = 8, .train_episodes = 10});
    ddqn.meta_train(md, md.split().meta_train, {});
    std::vector<std::unique_ptr<Agent>> agents;
    agents.push_back(std::make_unique<RandSearchAgent>());
    agents.push_back(std::make_unique<BosAgent>());
    agents.push_back(std::make_unique<FreezeThawAgent>(FreezeThawConfig{.mc_samples = 200}));
    agents.push_back(avg.clone());
    agents.push_back(ddqn.clone());
    for (auto& agent : agents)
      for (int d = 0; d < static_cast<int>(md.num_datasets()); ++d) {
        Environment env(md);
        auto obs = env.reset(d, {});
        agent->reset(obs, static_cast<std::uint64_t>(d));
        double charged = 0.0;
        auto scan = [&](const Observation& o) {
          ++observations;
          std::vector<std::string> strings;
          std::vector<double> numbers;
          collect_numbers(to_json(o), strings, numbers);
          for (const auto& s : strings) leaks += s.find("test") != std::string::npos;
          // A number counts as a leak only when it is a test score that no
          // visible curve also contains.
          for (double v : numbers) leaks += hidden.count(v) && !visible.count(v);
        };
        scan(obs);
        while (!env.done()) {
          const auto r = env.step(agent->act(obs));
          charged += r.charged;
          budget_violations += r.charged < 0.0;
          obs = r.observation;
          scan(obs);
        }
        const double total = md.dataset(d).total_budget;
        const double err = std::abs(charged - total) / total;
        worst_budget = std::max(worst_budget, err);
        budget_violations += err > kBudgetRelTol || obs.remaining != 0.0;
        ++episodes;
      }
  }
  return {leaks == 0 && budget_violations == 0,
          std::to_string(observations) + " observations, " + std::to_string(leaks) + " test leaks; " +
              std::to_string(episodes) + " episodes, max relative budget error " + fmt(worst_budget)};
}

// ----------------------------------------------------------------------- 4

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LC_ARENA_BIN) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome structural_counts(const fs::path& work) {
  std::string detail;
  bool ok = true;
  for (auto [nd, na, expected] : {std::tuple{30, 20, 600}, std::tuple{30, 40, 1200}}) {
    const fs::path out = work / ("counts_" + std::to_string(na));
    if (run_cli("generate --datasets " + std::to_string(nd) + " --algorithms " + std::to_string(na) +
                " --anchors 5 --out " + out.string()) != 0)
      return {false, "generate failed"};
    std::map<std::string, int> per_split;
    for (const auto& e : fs::directory_iterator(out / "curves")) {
      const auto stem = e.path().stem().string();
      ++per_split[stem.substr(stem.rfind('_') + 1)];
    }
    const auto md = load_metadataset(out / "manifest.json");
    for (const char* s : {"train", "valid", "test"}) ok = ok && per_split[s] == expected;
    ok = ok && static_cast<int>(md.num_datasets() * md.num_algorithms()) == expected;
    detail += "(" + std::to_string(nd) + "," + std::to_string(na) + ") -> " + std::to_string(per_split["train"]) + "/" +
              std::to_string(per_split["valid"]) + "/" + std::to_string(per_split["test"]) + "  ";
  }
  return {ok, detail + "curves per train/valid/test split"};
}

// ----------------------------------------------------------------------- 5

Outcome gradient_check() {
  std::mt19937_64 rng(555);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> width(2, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> sizes{width(rng)};
    const int hidden = 1 + static_cast<int>(rng() % 2);
    for (int h = 0; h < hidden; ++h) sizes.push_back(width(rng));
    sizes.push_back(width(rng));
    Mlp net(sizes, rng());
    for (auto& b : net.params().biases)
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.1 * n01(rng);
    Eigen::VectorXd x(sizes.front());
    bool near_kink = true;
    while (near_kink) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = n01(rng);
      near_kink = false;
      for (const auto& z : net.hidden_preactivations(x)) near_kink = near_kink || (z.array().abs() < kKinkGuard).any();
    }
    const int index = static_cast<int>(rng() % static_cast<std::uint64_t>(sizes.back()));
    const double y = n01(rng);
    auto loss = [&] {
      const double d = y - net.forward(x)[index];
      return d * d;
    };
    const auto g = net.backward(x, index, y);
    auto check = [&](double& param, double analytic) {
      const double orig = param;
      param = orig + kFdStep;
      const double up = loss();
      param = orig - kFdStep;
      const double down = loss();
      param = orig;
      const double fd = (up - down) / (2 * kFdStep);
      worst = std::max(worst, std::abs(fd - analytic) / std::max(1.0, std::abs(fd)));
    };
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      auto& W = net.params().weights[l];
      for (Eigen::Index r = 0; r < W.rows(); ++r)
        for (Eigen::Index c = 0; c < W.cols(); ++c) check(W(r, c), g.weights[l](r, c));
      auto& b = net.params().biases[l];
      for (Eigen::Index r = 0; r < b.size(); ++r) check(b[r], g.biases[l][r]);
    }
  }
  return {worst < kGradRelTol, "20 random nets, max relative error " + fmt(worst)};
}

// ----------------------------------------------------------------------- 6

Mlp constant_net(const std::vector<double>& q) {
  Mlp net({2, static_cast<int>(q.size())}, 0);
  net.params().set_zero();
  for (std::size_t i = 0; i < q.size(); ++i) net.params().biases[0][static_cast<Eigen::Index>(i)] = q[i];
  return net;
}

Outcome ddqn_target_formula() {
  const auto online = constant_net({0.2, 0.5});
  const auto target = constant_net({0.4, 0.3});
  const Transition t{Eigen::VectorXd::Zero(2), 0, 0.1, Eigen::VectorXd::Zero(2), false};
  const double y = ddqn_target(online, target, t, 0.99);
  const double hand = 0.1 + 0.99 * 0.3;
  bool ok = y == hand;

  // The batched step reports the pre-update loss: mean (y - Q(s, a))^2.
  std::vector<Transition> batch{t, {Eigen::VectorXd::Zero(2), 1, 0.25, Eigen::VectorXd::Zero(2), true}};
  Mlp trained = online;
  auto opt = AdamState::for_net(trained);
  const double loss = ddqn_train_step(trained, target, batch, 0.99, opt);
  const double expected_loss = ((hand - 0.2) * (hand - 0.2) + (0.25 - 0.5) * (0.25 - 0.5)) / 2;
  ok = ok && loss == expected_loss;

  // theta == theta': single-network max target.
  Mlp shared({3, 8, 4}, 9);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    Transition s{Eigen::VectorXd::Zero(3), 0, n01(rng), Eigen::VectorXd(3), false};
    for (int k = 0; k < 3; ++k) s.next_state[k] = n01(rng);
    mismatches += ddqn_target(shared, shared, s, 0.95) != s.reward + 0.95 * shared.forward(s.next_state).maxCoeff();
  }
  ok = ok && mismatches == 0;
  return {ok, "y = " + fmt(y, 17) + " (hand 0.397), batch loss exact: " + (loss == expected_loss ? "yes" : "no") +
                  ", shared-network mismatches " + std::to_string(mismatches) + "/100"};
}

// ----------------------------------------------------------------------- 7

Outcome ablation_direction() {
  GenSpec spec;
  spec.n_datasets = 30;  // 20 meta-train, 10 meta-test
  spec.n_algorithms = 10;
  spec.seed = 1;
  const auto md = generate(spec);
  HarnessConfig h;
  h.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) h.seeds.push_back(s);
  const DdqnConfig cfg;

  auto margin = [&](AblationKind kind, double& full, double& ablated) {
    const auto r = run_ablation(kind, cfg, md, h);
    full = ablated = 0.0;
    for (const auto& e : r.full.entries) full += e.alc;
    for (const auto& e : r.ablated.entries) ablated += e.alc;
    const auto n = static_cast<double>(r.full.entries.size());
    full /= n;
    ablated /= n;
    return full - ablated;
  };
  double f1, a1, f2, a2;
  const double m1 = margin(AblationKind::no_meta_train, f1, a1);
  const double m2 = margin(AblationKind::last_point_only, f2, a2);
  return {m1 > 0.0 && m2 > 0.0, std::to_string(md.split().meta_train.size()) + " meta-train datasets, 20 seeds; " +
                                    "meta-trained " + fmt(f1) + " vs untrained " + fmt(a1) + " (margin " + fmt(m1) +
                                    "); full " + fmt(f2) + " vs last-point " + fmt(a2) + " (margin " + fmt(m2) + ")"};
}

// ----------------------------------------------------------------------- 8

Outcome bos_phenomenon() {
  GenSpec spec;
  spec.n_datasets = 10;
  spec.n_algorithms = 10;
  spec.scenario = Scenario::non_crossing;
  spec.seed = 8;
  const auto md = generate(spec);
  int correct = 0;
  const int n = static_cast<int>(md.num_datasets());
  double bos_alc = 0.0, rand_alc = 0.0;
  for (int d = 0; d < n; ++d) {
    double alpha = 0.0;
    for (int a = 0; a < static_cast<int>(md.num_algorithms()); ++a)
      alpha = std::max(alpha, md.curve(d, a, Split::valid).anchors().front().cost);
    if (!(alpha * static_cast<double>(md.num_algorithms()) < md.dataset(d).total_budget))
      return {false, "first anchors too late for a feasible probe budget on dataset " + std::to_string(d)};
    const auto rank = final_rank(md, d);
    const int best = static_cast<int>(std::find(rank.begin(), rank.end(), 1) - rank.begin());
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      BosAgent bos(BosConfig{.alpha = alpha});
      const auto t = run_episode(bos, md, d, {}, seed);
      bos_alc += t.alc;
      if (seed == 1) correct += t.steps.back().action.predicted_best == best;
      RandSearchAgent rs;
      for (int run = 0; run < 5; ++run) rand_alc += run_episode(rs, md, d, {}, seed, run).alc / 5;
    }
  }
  bos_alc /= 20.0 * n;
  rand_alc /= 20.0 * n;
  return {correct == n && bos_alc >= rand_alc, "rank-1 selected on " + std::to_string(correct) + "/" +
                                                   std::to_string(n) + " datasets; mean ALC BoS " + fmt(bos_alc) +
                                                   " vs RandSearch " + fmt(rand_alc) + " over 20 seeds"};
}

// ----------------------------------------------------------------------- 9

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

double enumerated_gain(const ArmPosterior& seen, const ArmPosterior& other) {
  const double h0 = binary_entropy(normal_cdf((seen.mean - other.mean) / std::sqrt(seen.variance + other.variance)));
  const double s = std::sqrt(seen.variance), so = std::sqrt(other.variance);
  double expected = 0.0, mass = 0.0;
  for (double y = seen.mean - 8 * s; y <= seen.mean + 8 * s; y += 0.001) {
    const double w = std::exp(-0.5 * std::pow((y - seen.mean) / s, 2));
    expected += w * binary_entropy(normal_cdf((y - other.mean) / so));
    mass += w;
  }
  return h0 - expected / mass;
}

Observation blank(int n, double total) {
  Observation o;
  auto ctx = std::make_shared<EpisodeContext>();
  o.context = ctx;
  o.total_budget = o.remaining = total;
  o.algorithms.resize(static_cast<std::size_t>(n));
  return o;
}

void probe(Observation& o, int algo, double cost, double score) {
  auto& p = o.algorithms[static_cast<std::size_t>(algo)];
  o.remaining -= cost;
  p.spent += cost;
  p.valid.push_back({p.spent, score});
  p.train.push_back({p.spent, score});
}

Outcome baseline_contracts() {
  std::vector<std::string> failures;

  // AvgRank.
  const auto ranking = average_ranking({{1, 2, 3}, {2, 1, 3}});
  if (ranking.average_rank != std::vector<double>{1.5, 1.5, 3.0} || ranking.selected != 0)
    failures.push_back("avg_rank fixture");
  {
    GenSpec spec;
    spec.n_datasets = 6;
    spec.n_algorithms = 5;
    const auto md = generate(spec);
    AvgRankAgent agent;
    agent.meta_train(md, md.split().meta_train, {});
    for (int d : md.split().meta_test)
      if (run_episode(agent, md, d, {}, 1).steps.size() != 1) failures.push_back("avg_rank steps");
  }

  // BoS probe/commit sequence.
  {
    auto o = blank(3, 10);
    std::vector<Action> seq;
    const double scores[3] = {0.3, 0.6, 0.4};
    for (int k = 0; k < 3; ++k) {
      seq.push_back(bos_act(o, 1.0));
      probe(o, seq.back().algo, 1.0, scores[seq.back().algo]);
    }
    seq.push_back(bos_act(o, 1.0));
    const std::vector<Action> expected{{0, 1.0, 0}, {1, 1.0, 0}, {2, 1.0, 1}, {1, 7.0, 1}};
    if (seq != expected) failures.push_back("bos sequence");
  }

  // RandSearch uniformity.
  {
    auto o = blank(4, 100);
    auto rng = make_rng(42);
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 10000; ++i) ++counts[static_cast<std::size_t>(randsearch_act(o, rng, 2, 20).algo)];
    for (int c : counts)
      if (std::abs(c - 2500) > kUniformSlack) failures.push_back("rand_search uniformity");
  }

  // Freeze-Thaw acquisition vs. enumeration, and the symmetric tie-break.
  double worst_nats = 0.0;
  {
    const std::vector<ArmPosterior> arms{{0.5, 0.01}, {0.5, 0.09}};
    auto rng = make_rng(5);
    const auto acq = entropy_search_acquisition(arms, 100000, 64, rng);
    const double g0 = enumerated_gain(arms[0], arms[1]);
    const double g1 = enumerated_gain(arms[1], arms[0]);
    worst_nats = std::max(std::abs(acq[0] - g0), std::abs(acq[1] - g1));
    if (worst_nats > kNatsTol || (acq[1] > acq[0]) != (g1 > g0)) failures.push_back("freeze_thaw oracle");

    const std::vector<ArmPosterior> same{{0.4, 0.04}, {0.4, 0.04}};
    const auto tie = entropy_search_acquisition(same, 100000, 16, rng);
    if (argmax_with_tolerance(tie, FreezeThawConfig{}.tie_tolerance) != 0) failures.push_back("freeze_thaw tie");
  }

  std::string detail = failures.empty() ? "avg_rank, bos, rand_search, freeze_thaw contracts hold" : "failed:";
  for (const auto& f : failures) detail += " " + f;
  detail += "; freeze_thaw max |MC - enumeration| " + fmt(worst_nats) + " nats";
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------------- 10

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      out[fs::relative(e.path(), dir).string()] = s.str();
    }
  return out;
}

Outcome reproducibility(const fs::path& work) {
  auto pipeline = [&](const fs::path& out) {
    const std::string m = " --manifest " + (out / "data" / "manifest.json").string() + " --seeds 1,2,3";
    int rc = run_cli("generate --datasets 9 --algorithms 5 --seed 12 --out " + (out / "data").string());
    rc |= run_cli("train --agent ddqn --episodes 20 --train-seed 4 --out " + (out / "ddqn").string() + m);
    rc |= run_cli("evaluate --agent ddqn --out " + (out / "ddqn").string() + m);
    rc |= run_cli("train --agent avg_rank --out " + (out / "avg").string() + m);
    rc |= run_cli("evaluate --agent avg_rank --out " + (out / "avg").string() + m);
    for (const char* a : {"bos", "rand_search", "freeze_thaw"})
      rc |= run_cli(std::string("evaluate --agent ") + a + " --workers 2 --out " + (out / a).string() + m);
    rc |= run_cli("report " + (out / "ddqn").string() + " " + (out / "avg").string() + " " + (out / "bos").string() +
                  " " + (out / "rand_search").string() + " " + (out / "freeze_thaw").string() + " --out " +
                  (out / "cmp").string());
    return rc == 0;
  };
  if (!pipeline(work / "repro_a") || !pipeline(work / "repro_b")) return {false, "pipeline command failed"};
  const auto a = tree(work / "repro_a"), b = tree(work / "repro_b");
  int differing = 0;
  for (const auto& [path, content] : a) differing += !b.count(path) || b.at(path) != content;
  differing += static_cast<int>(b.size()) - static_cast<int>(a.size());
  return {differing == 0 && !a.empty(),
          std::to_string(a.size()) + " files compared across two reruns, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("lcarena_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(work);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "reward math", reward_math},
      {2, "ALC identity", alc_identity},
      {3, "hidden-test and budget invariants", hidden_test_and_budget},
      {4, "structural curve counts", [&] { return structural_counts(work); }},
      {5, "value-network gradient check", gradient_check},
      {6, "DDQN target formula", ddqn_target_formula},
      {7, "ablation direction", ablation_direction},
      {8, "BoS on non-crossing curves", bos_phenomenon},
      {9, "baseline policy contracts", baseline_contracts},
      {10, "CLI reproducibility", [&] { return reproducibility(work); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.name << " -- " << o.detail
              << " [" << fmt(secs, 3) << " s]" << std::endl;
  }
  fs::remove_all(work);
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
