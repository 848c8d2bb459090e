#include "maxspan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace maxspan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ParseError("unknown key `" + (path.empty() ? key : path + "." + key) + "`");
  }
}

double require_number(const json& obj, const char* key, double fallback,
                      const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ValidationError("`" + path + "." + key + "` must be a number");
  return obj[key].get<double>();
}

int require_int(const json& obj, const char* key, int fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ValidationError("`" + path + "." + key + "` must be an integer");
  return obj[key].get<int>();
}

std::string require_string(const json& obj, const char* key, const std::string& fallback,
                           const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string())
    throw ValidationError("`" + path + "." + key + "` must be a string");
  return obj[key].get<std::string>();
}

GraphFamily parse_family(const std::string& name) {
  if (name == "er") return GraphFamily::ER;
  if (name == "pa" || name == "preferential_attachment") return GraphFamily::PreferentialAttachment;
  if (name == "dg" || name == "directed_geometric") return GraphFamily::DirectedGeometric;
  if (name == "k_out" || name == "kout") return GraphFamily::KOut;
  if (name == "edge_list") return GraphFamily::EdgeList;
  throw ValidationError("`graph.family` must be one of er, pa, dg, k_out, edge_list");
}

const char* family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::ER: return "er";
    case GraphFamily::PreferentialAttachment: return "pa";
    case GraphFamily::DirectedGeometric: return "dg";
    case GraphFamily::KOut: return "k_out";
    case GraphFamily::EdgeList: return "edge_list";
  }
  return "unknown";
}

PlacementStrategy parse_strategy_name(const std::string& name) {
  PlacementStrategy s;
  if (name == "random") {
    s.kind = PlacementKind::Random;
  } else if (name == "maxspan") {
    s.kind = PlacementKind::MaxSpAN;
  } else {
    s.kind = PlacementKind::CentralityBased;
    if (name == "in_degree") s.measure = CentralityMeasure::InDegree;
    else if (name == "out_degree") s.measure = CentralityMeasure::OutDegree;
    else if (name == "betweenness") s.measure = CentralityMeasure::Betweenness;
    else if (name == "closeness") s.measure = CentralityMeasure::Closeness;
    else if (name == "eigenvector") s.measure = CentralityMeasure::Eigenvector;
    else
      throw ValidationError("`attack.strategies` entry `" + name + "` is not a strategy");
  }
  return s;
}

std::uint64_t derive_seed(std::uint64_t run_seed, const char* label) {
  return Rng(run_seed).substream(label).next_u64();
}

Task build_task(const ExperimentConfig& cfg, int n_nodes, std::uint64_t run_seed) {
  if (cfg.task.kind == TaskConfig::Kind::Quadratic)
    return make_quadratic_task(n_nodes, cfg.task.quad_dim, cfg.task.quad_target_std,
                               derive_seed(run_seed, "task"));
  SoftmaxTask task = make_blob_task(cfg.task.blob, derive_seed(run_seed, "task"));
  partition_data(task, n_nodes, cfg.sim.partition, derive_seed(run_seed, "shards"),
                 cfg.sim.batch_size);
  return task;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::uint64_t graph_seed_used = 0;
  RunRecord clean;
  std::vector<RunRecord> attacked;  // one per strategy
};

void write_aggregates(const std::string& run_dir, const std::vector<std::string>& strategy_names,
                      const std::vector<SeedOutcome>& outcomes, int t_attack) {
  fs::create_directories(run_dir + "/aggregate");
  auto curve_csv = [](const AggregateSeries& agg) {
    std::ostringstream out;
    out << "epoch,mean,std,ci_low,ci_high\n";
    for (std::size_t t = 0; t < agg.mean.size(); ++t)
      out << t << "," << format_double(agg.mean[t]) << "," << format_double(agg.stddev[t]) << ","
          << format_double(agg.ci_low[t]) << "," << format_double(agg.ci_high[t]) << "\n";
    return out.str();
  };

  std::vector<const RunRecord*> clean_records;
  for (const auto& o : outcomes) clean_records.push_back(&o.clean);
  if (clean_records.size() >= 2)
    atomic_write_file(run_dir + "/aggregate/clean_curve.csv",
                      curve_csv(aggregate_series(clean_records)));

  std::vector<AalStats> stats(strategy_names.size());
  for (std::size_t s = 0; s < strategy_names.size(); ++s) {
    std::vector<const RunRecord*> attacked_records;
    for (const auto& o : outcomes) attacked_records.push_back(&o.attacked[s]);
    if (attacked_records.size() >= 2)
      atomic_write_file(run_dir + "/aggregate/" + strategy_names[s] + "_curve.csv",
                        curve_csv(aggregate_series(attacked_records)));
    stats[s] = aggregate_aal(clean_records, attacked_records, t_attack);
  }

  std::ostringstream summary;
  summary << "strategy,aal_mean,aal_std,n_seeds,advantage_vs_next_best\n";
  for (std::size_t s = 0; s < strategy_names.size(); ++s) {
    double next_best = -1e300;
    for (std::size_t o = 0; o < strategy_names.size(); ++o)
      if (o != s) next_best = std::max(next_best, stats[o].mean);
    double advantage = std::numeric_limits<double>::quiet_NaN();
    if (strategy_names.size() > 1 && next_best > 0.0)
      advantage = attack_advantage(stats[s].mean, next_best);
    summary << strategy_names[s] << "," << format_double(stats[s].mean) << ","
            << format_double(stats[s].stddev) << "," << stats[s].n_seeds << ","
            << format_double(advantage) << "\n";
  }
  atomic_write_file(run_dir + "/aggregate/summary.csv", summary.str());
}

}  // namespace

int ExperimentConfig::resolved_n_advs() const {
  if (n_advs > 0) return n_advs;
  return std::max(1, static_cast<int>(std::llround(adversarial_fraction * graph.n)));
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config root must be an object");
  check_keys(root, {"graph", "task", "sim", "attack", "n_seeds", "output_dir"}, "");
  if (!root.contains("graph")) throw ValidationError("`graph` is required");

  ExperimentConfig cfg;

  const json& graph = root["graph"];
  check_keys(graph, {"family", "n", "p_edge", "m_attach", "radius", "k", "path"}, "graph");
  if (!graph.contains("family")) throw ValidationError("`graph.family` is required");
  cfg.graph.family = parse_family(require_string(graph, "family", "", "graph"));
  cfg.graph.n = require_int(graph, "n", 25, "graph");
  switch (cfg.graph.family) {
    case GraphFamily::ER:
      cfg.graph.p_edge = require_number(graph, "p_edge", 0.5, "graph");
      if (cfg.graph.p_edge < 0.0 || cfg.graph.p_edge > 1.0)
        throw ValidationError("`graph.p_edge` must be in [0, 1]");
      break;
    case GraphFamily::PreferentialAttachment:
      cfg.graph.m_attach = require_int(graph, "m_attach", 3, "graph");
      if (cfg.graph.m_attach < 1 || cfg.graph.m_attach >= cfg.graph.n)
        throw ValidationError("`graph.m_attach` must be in [1, n)");
      break;
    case GraphFamily::DirectedGeometric:
      cfg.graph.radius = require_number(graph, "radius", 0.2, "graph");
      if (cfg.graph.radius <= 0.0 || cfg.graph.radius > std::sqrt(2.0))
        throw ValidationError("`graph.radius` must be in (0, sqrt(2)]");
      break;
    case GraphFamily::KOut:
      cfg.graph.k = require_int(graph, "k", 5, "graph");
      if (cfg.graph.k < 1 || cfg.graph.k >= cfg.graph.n)
        throw ValidationError("`graph.k` must be in [1, n)");
      break;
    case GraphFamily::EdgeList:
      throw ValidationError("`graph.family` edge_list is not usable in sweeps (no random seeds)");
  }
  if (cfg.graph.n < 2) throw ValidationError("`graph.n` must be >= 2");

  if (root.contains("task")) {
    const json& task = root["task"];
    check_keys(task,
               {"kind", "feature_dim", "n_classes", "train_samples", "test_samples", "mean_std",
                "dim", "target_std"},
               "task");
    const std::string kind = require_string(task, "kind", "softmax", "task");
    if (kind == "softmax") {
      cfg.task.kind = TaskConfig::Kind::Softmax;
      cfg.task.blob.feature_dim = require_int(task, "feature_dim", 16, "task");
      cfg.task.blob.n_classes = require_int(task, "n_classes", 10, "task");
      cfg.task.blob.train_samples = require_int(task, "train_samples", 4000, "task");
      cfg.task.blob.test_samples = require_int(task, "test_samples", 2000, "task");
      cfg.task.blob.mean_std = require_number(task, "mean_std", cfg.task.blob.mean_std, "task");
      if (cfg.task.blob.feature_dim < 1) throw ValidationError("`task.feature_dim` must be >= 1");
      if (cfg.task.blob.n_classes < 2) throw ValidationError("`task.n_classes` must be >= 2");
    } else if (kind == "quadratic") {
      cfg.task.kind = TaskConfig::Kind::Quadratic;
      cfg.task.quad_dim = require_int(task, "dim", 5, "task");
      cfg.task.quad_target_std = require_number(task, "target_std", 3.0, "task");
      if (cfg.task.quad_dim < 1) throw ValidationError("`task.dim` must be >= 1");
    } else {
      throw ValidationError("`task.kind` must be softmax or quadratic");
    }
  }

  if (root.contains("sim")) {
    const json& sim = root["sim"];
    check_keys(sim, {"alpha", "batch_size", "n_epochs", "partition", "classes_per_node",
                     "init_std"},
               "sim");
    cfg.sim.alpha = require_number(sim, "alpha", 0.05, "sim");
    cfg.sim.batch_size = require_int(sim, "batch_size", 32, "sim");
    cfg.sim.n_epochs = require_int(sim, "n_epochs", 100, "sim");
    cfg.sim.init_std = require_number(sim, "init_std", 0.1, "sim");
    const std::string partition = require_string(sim, "partition", "iid", "sim");
    if (partition == "iid") cfg.sim.partition.kind = PartitionKind::IID;
    else if (partition == "non_iid") cfg.sim.partition.kind = PartitionKind::NonIID;
    else throw ValidationError("`sim.partition` must be iid or non_iid");
    cfg.sim.partition.classes_per_node = require_int(sim, "classes_per_node", 3, "sim");
    if (cfg.sim.alpha <= 0.0) throw ValidationError("`sim.alpha` must be > 0");
    if (cfg.sim.batch_size < 1) throw ValidationError("`sim.batch_size` must be >= 1");
    if (cfg.sim.n_epochs < 1) throw ValidationError("`sim.n_epochs` must be >= 1");
  }

  std::vector<std::string> strategy_names = {"random", "eigenvector", "maxspan"};
  if (root.contains("attack")) {
    const json& attack = root["attack"];
    check_keys(attack,
               {"epsilon", "t_attack", "n_advs", "adversarial_fraction", "strategies", "tracker"},
               "attack");
    cfg.epsilon = require_number(attack, "epsilon", cfg.epsilon, "attack");
    cfg.t_attack = require_int(attack, "t_attack", cfg.t_attack, "attack");
    cfg.n_advs = require_int(attack, "n_advs", 0, "attack");
    cfg.adversarial_fraction =
        require_number(attack, "adversarial_fraction", cfg.adversarial_fraction, "attack");
    if (cfg.epsilon < 0.0) throw ValidationError("`attack.epsilon` must be >= 0");
    if (cfg.t_attack < 0) throw ValidationError("`attack.t_attack` must be >= 0");
    if (cfg.adversarial_fraction <= 0.0 || cfg.adversarial_fraction >= 1.0)
      throw ValidationError("`attack.adversarial_fraction` must be in (0, 1)");
    const std::string tracker =
        require_string(attack, "tracker", "poisoned_gradient", "attack");
    if (tracker == "poisoned_gradient") cfg.tracker = AdversaryTracker::PoisonedGradient;
    else if (tracker == "honest_recursion") cfg.tracker = AdversaryTracker::HonestRecursion;
    else throw ValidationError("`attack.tracker` must be poisoned_gradient or honest_recursion");
    if (attack.contains("strategies")) {
      if (!attack["strategies"].is_array() || attack["strategies"].empty())
        throw ValidationError("`attack.strategies` must be a nonempty array");
      strategy_names.clear();
      for (const auto& s : attack["strategies"]) {
        if (!s.is_string()) throw ValidationError("`attack.strategies` entries must be strings");
        strategy_names.push_back(s.get<std::string>());
      }
    }
  }
  const int n_advs = cfg.resolved_n_advs();
  if (n_advs >= cfg.graph.n)
    throw ValidationError("`attack.n_advs` must be smaller than `graph.n`");
  for (const std::string& name : strategy_names) {
    PlacementStrategy s = parse_strategy_name(name);
    s.n_advs = n_advs;
    cfg.strategies.push_back(s);
  }

  cfg.n_seeds = require_int(root, "n_seeds", 20, "");
  if (cfg.n_seeds < 1) throw ValidationError("`n_seeds` must be >= 1");
  cfg.output_dir = require_string(root, "output_dir", "out", "");
  if (cfg.t_attack >= cfg.sim.n_epochs)
    throw ValidationError("`attack.t_attack` must be smaller than `sim.n_epochs`");
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json graph{{"family", family_name(cfg.graph.family)}, {"n", cfg.graph.n}};
  switch (cfg.graph.family) {
    case GraphFamily::ER: graph["p_edge"] = cfg.graph.p_edge; break;
    case GraphFamily::PreferentialAttachment: graph["m_attach"] = cfg.graph.m_attach; break;
    case GraphFamily::DirectedGeometric: graph["radius"] = cfg.graph.radius; break;
    case GraphFamily::KOut: graph["k"] = cfg.graph.k; break;
    case GraphFamily::EdgeList: graph["path"] = cfg.graph.path; break;
  }
  json task;
  if (cfg.task.kind == TaskConfig::Kind::Softmax)
    task = {{"kind", "softmax"},
            {"feature_dim", cfg.task.blob.feature_dim},
            {"n_classes", cfg.task.blob.n_classes},
            {"train_samples", cfg.task.blob.train_samples},
            {"test_samples", cfg.task.blob.test_samples},
            {"mean_std", cfg.task.blob.mean_std}};
  else
    task = {{"kind", "quadratic"}, {"dim", cfg.task.quad_dim},
            {"target_std", cfg.task.quad_target_std}};
  json sim{{"alpha", cfg.sim.alpha},
           {"batch_size", cfg.sim.batch_size},
           {"n_epochs", cfg.sim.n_epochs},
           {"partition", cfg.sim.partition.kind == PartitionKind::IID ? "iid" : "non_iid"},
           {"classes_per_node", cfg.sim.partition.classes_per_node},
           {"init_std", cfg.sim.init_std}};
  json strategies = json::array();
  for (const auto& s : cfg.strategies) strategies.push_back(placement_strategy_name(s));
  json attack{{"epsilon", cfg.epsilon},
              {"t_attack", cfg.t_attack},
              {"n_advs", cfg.resolved_n_advs()},
              {"strategies", strategies},
              {"tracker", cfg.tracker == AdversaryTracker::PoisonedGradient
                              ? "poisoned_gradient"
                              : "honest_recursion"}};
  json root{{"graph", graph}, {"task", task},   {"sim", sim},
            {"attack", attack}, {"n_seeds", cfg.n_seeds}, {"output_dir", cfg.output_dir}};
  return root.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // output_dir does not change results, so it stays out of the hash.
  ExperimentConfig canonical = cfg;
  canonical.output_dir = "";
  const std::uint64_t h = Rng::fnv1a(resolved_config_json(canonical));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp);
    out << contents;
  }
  fs::rename(tmp, path);
}

ExperimentManifest run_experiment(const ExperimentConfig& cfg, int jobs) {
  if (jobs <= 0) {
    if (const char* env = std::getenv("MAXSPAN_SIM_JOBS")) jobs = std::atoi(env);
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }

  ExperimentManifest manifest;
  manifest.config_hash = config_hash(cfg);
  manifest.run_dir = cfg.output_dir + "/" + manifest.config_hash;
  fs::create_directories(manifest.run_dir);

  std::vector<std::string> strategy_names;
  for (const auto& s : cfg.strategies) strategy_names.push_back(placement_strategy_name(s));

  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(cfg.n_seeds));
  std::atomic<int> next_seed{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int s = next_seed.fetch_add(1);
      if (s >= cfg.n_seeds || failed.load()) return;
      try {
        const auto seed = static_cast<std::uint64_t>(s);
        SeedOutcome& outcome = outcomes[static_cast<std::size_t>(s)];
        outcome.seed = seed;

        GraphSpec spec = cfg.graph;
        spec.seed = derive_seed(seed, "graph");
        const GenerateResult gen = generate_strongly_connected(spec, cfg.max_graph_attempts);
        outcome.graph_seed_used = gen.seed_used;

        const Task task = build_task(cfg, cfg.graph.n, seed);
        SimConfig sim = cfg.sim;
        sim.seed = seed;

        const std::string hash = manifest.config_hash;
        outcome.clean = run_simulation(gen.graph, task, sim, nullptr, hash + ":clean");
        for (std::size_t st = 0; st < cfg.strategies.size(); ++st) {
          AttackConfig attack{cfg.epsilon, cfg.t_attack, cfg.strategies[st], cfg.tracker};
          const AttackRun run = resolve_attack(attack, gen.graph, seed);
          outcome.attacked.push_back(
              run_simulation(gen.graph, task, sim, &run, hash + ":" + strategy_names[st]));
        }

        // Per-seed outputs.
        const std::string seed_dir = manifest.run_dir + "/" + std::to_string(s);
        fs::create_directories(seed_dir);
        auto dump_run = [&](const RunRecord& r, const std::string& name) {
          std::ostringstream out;
          write_run_csv(r, out);
          atomic_write_file(seed_dir + "/" + name + ".csv", out.str());
        };
        dump_run(outcome.clean, "clean");
        json placements = json::object();
        for (std::size_t st = 0; st < strategy_names.size(); ++st) {
          dump_run(outcome.attacked[st], strategy_names[st]);
          placements[strategy_names[st]] = {
              {"adversaries", outcome.attacked[st].adversaries},
              {"d_avg", outcome.attacked[st].d_avg}};
        }
        json sidecar{{"config", json::parse(resolved_config_json(cfg))},
                     {"seed", seed},
                     {"graph_seed_used", outcome.graph_seed_used},
                     {"placements", placements}};
        atomic_write_file(seed_dir + "/run.json", sidecar.dump(2) + "\n");
      } catch (const std::exception& e) {
        std::scoped_lock lock(failure_mutex);
        failed.store(true);
        if (failure_message.empty())
          failure_message = "seed " + std::to_string(s) + ": " + e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_workers = std::min(jobs, cfg.n_seeds);
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) {
    atomic_write_file(manifest.run_dir + "/manifest.json",
                      json{{"error", failure_message}}.dump(2) + "\n");
    throw Error("run_experiment failed: " + failure_message);
  }

  for (const auto& o : outcomes) {
    manifest.seeds.push_back(o.seed);
    manifest.graph_seeds_used.push_back(o.graph_seed_used);
  }

  write_aggregates(manifest.run_dir, strategy_names, outcomes, cfg.t_attack);

  json mj{{"config", json::parse(resolved_config_json(cfg))},
          {"tool_version", kToolVersion},
          {"seeds", manifest.seeds},
          {"graph_seeds_used", manifest.graph_seeds_used}};
  atomic_write_file(manifest.run_dir + "/manifest.json", mj.dump(2) + "\n");
  return manifest;
}

void report(const std::string& run_dir) {
  std::ifstream in(run_dir + "/manifest.json");
  if (!in) throw ParseError("cannot open " + run_dir + "/manifest.json");
  json mj = json::parse(in);
  if (mj.contains("error")) throw Error("run directory holds a failed run");
  const json& config = mj["config"];
  const int t_attack = config["attack"]["t_attack"].get<int>();
  std::vector<std::string> strategy_names;
  for (const auto& s : config["attack"]["strategies"]) strategy_names.push_back(s.get<std::string>());
  const std::string hash = fs::path(run_dir).filename().string();

  std::vector<SeedOutcome> outcomes;
  for (const auto& seed_json : mj["seeds"]) {
    const auto seed = seed_json.get<std::uint64_t>();
    const std::string seed_dir = run_dir + "/" + std::to_string(seed);
    SeedOutcome outcome;
    outcome.seed = seed;
    auto read_run = [&](const std::string& name, const std::string& fingerprint) {
      std::ifstream csv(seed_dir + "/" + name + ".csv");
      if (!csv) throw ParseError("missing run CSV: " + seed_dir + "/" + name + ".csv");
      RunRecord r = read_run_csv(csv);
      r.seed = seed;
      r.fingerprint = fingerprint;
      return r;
    };
    outcome.clean = read_run("clean", hash + ":clean");
    for (const std::string& name : strategy_names)
      outcome.attacked.push_back(read_run(name, hash + ":" + name));
    outcomes.push_back(std::move(outcome));
  }
  write_aggregates(run_dir, strategy_names, outcomes, t_attack);
}

}  // namespace maxspan
