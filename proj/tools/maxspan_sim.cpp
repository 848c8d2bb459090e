// Command-line front end: graph generation, centrality tables, similarity
// curves, adversary placement, single simulations and full experiment sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "maxspan/experiment.hpp"

namespace {

using namespace maxspan;

GraphFamily family_from_name(const std::string& name) {
  if (name == "er") return GraphFamily::ER;
  if (name == "pa") return GraphFamily::PreferentialAttachment;
  if (name == "dg") return GraphFamily::DirectedGeometric;
  if (name == "k_out") return GraphFamily::KOut;
  throw InvalidSpec("unknown graph family: " + name);
}

CentralityMeasure measure_from_name(const std::string& name) {
  for (const CentralityMeasure m : kAllCentralityMeasures)
    if (name == centrality_measure_name(m)) return m;
  throw InvalidSpec("unknown centrality measure: " + name);
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::cout << contents;
    return;
  }
  atomic_write_file(out_path, contents);
}

DirectedGraph load_graph(const std::string& path) {
  const EdgeListLoad load = load_edge_list(path);
  if (load.dropped_self_loops > 0 || load.dropped_duplicates > 0)
    std::cerr << "note: dropped " << load.dropped_self_loops << " self-loops and "
              << load.dropped_duplicates << " duplicate edges\n";
  return load.graph;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial node placement simulator for decentralized federated learning"};
  app.require_subcommand(1);

  // gen-graph
  auto* gen = app.add_subcommand("gen-graph", "Generate a synthetic topology as an edge list");
  std::string gen_family;
  int gen_n = 25;
  double gen_p = -1.0, gen_radius = -1.0;
  int gen_k = -1, gen_m = -1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool gen_sc = false;
  int gen_attempts = 100000;
  gen->add_option("--family", gen_family, "er | pa | dg | k_out")->required();
  gen->add_option("--n", gen_n, "node count");
  gen->add_option("--p-edge", gen_p, "ER edge probability");
  gen->add_option("--radius", gen_radius, "DG connection radius");
  gen->add_option("--k", gen_k, "k-out out-degree");
  gen->add_option("--m-attach", gen_m, "PA attachment count");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output edge-list path (default stdout)");
  gen->add_flag("--strongly-connected", gen_sc, "retry seeds until strongly connected");
  gen->add_option("--max-attempts", gen_attempts, "retry budget for --strongly-connected");

  // centrality
  auto* cent = app.add_subcommand("centrality", "Node centrality scores as CSV");
  std::string cent_graph, cent_measure = "eigenvector", cent_out;
  cent->add_option("--graph", cent_graph, "edge-list file")->required();
  cent->add_option("--measure", cent_measure,
                   "in_degree | out_degree | betweenness | closeness | eigenvector");
  cent->add_option("--out", cent_out, "output CSV path (default stdout)");

  // similarity
  auto* sim = app.add_subcommand("similarity", "Centrality similarity curve as CSV");
  std::string sim_graph, sim_fractions, sim_out;
  sim->add_option("--graph", sim_graph, "edge-list file")->required();
  sim->add_option("--fractions", sim_fractions,
                  "comma-separated fractions in (0,1] (default 0.05 grid)");
  sim->add_option("--out", sim_out, "output CSV path (default stdout)");

  // place
  auto* plc = app.add_subcommand("place", "Select adversarial nodes");
  std::string plc_graph, plc_strategy = "maxspan", plc_out;
  int plc_n_advs = 1;
  std::uint64_t plc_seed = 0;
  plc->add_option("--graph", plc_graph, "edge-list file")->required();
  plc->add_option("--strategy", plc_strategy,
                  "random | maxspan | in_degree | out_degree | betweenness | closeness | "
                  "eigenvector");
  plc->add_option("--n-advs", plc_n_advs, "adversary count")->required();
  plc->add_option("--seed", plc_seed, "placement seed");
  plc->add_option("--out", plc_out, "output CSV path (default stdout)");

  // simulate
  auto* simu = app.add_subcommand("simulate", "One simulation run as CSV");
  std::string simu_config, simu_strategy = "clean", simu_out;
  std::uint64_t simu_seed = 0;
  simu->add_option("--config", simu_config, "experiment config file")->required();
  simu->add_option("--seed", simu_seed, "run seed");
  simu->add_option("--strategy", simu_strategy, "clean or a placement strategy name");
  simu->add_option("--out", simu_out, "output CSV path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Full experiment sweep");
  std::string run_config, run_out;
  int run_seeds = -1, run_jobs = 0;
  run->add_option("--config", run_config, "experiment config file")->required();
  run->add_option("--seeds", run_seeds, "override n_seeds");
  run->add_option("--jobs", run_jobs, "worker count (default MAXSPAN_SIM_JOBS or all cores)");
  run->add_option("--out", run_out, "override output_dir");

  // report
  auto* rep = app.add_subcommand("report", "Recompute aggregates from stored run CSVs");
  std::string rep_dir;
  rep->add_option("--dir", rep_dir, "run directory (<output_dir>/<config_hash>)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GraphSpec spec;
      spec.family = family_from_name(gen_family);
      spec.n = gen_n;
      spec.p_edge = gen_p;
      spec.radius = gen_radius;
      spec.k = gen_k;
      spec.m_attach = gen_m;
      spec.seed = gen_seed;
      const GenerateResult result =
          gen_sc ? generate_strongly_connected(spec, gen_attempts) : generate(spec);
      std::ostringstream out;
      for (const auto& [u, v] : result.graph.edges()) out << u << " " << v << "\n";
      emit(gen_out, out.str());
      if (gen_sc && result.seed_used != gen_seed)
        std::cerr << "note: connectivity retries ended at seed " << result.seed_used << "\n";
    } else if (*cent) {
      const DirectedGraph g = load_graph(cent_graph);
      std::ostringstream out;
      write_centrality_csv(compute_centrality(g, measure_from_name(cent_measure)), out);
      emit(cent_out, out.str());
    } else if (*sim) {
      const DirectedGraph g = load_graph(sim_graph);
      std::vector<double> fractions;
      if (sim_fractions.empty()) {
        for (int i = 1; i <= 20; ++i) fractions.push_back(0.05 * i);
      } else {
        std::istringstream fs(sim_fractions);
        std::string tok;
        while (std::getline(fs, tok, ',')) fractions.push_back(std::stod(tok));
      }
      std::ostringstream out;
      out << "fraction,score\n";
      for (const auto& [f, score] : similarity_curve(g, fractions))
        out << format_double(f) << "," << format_double(score) << "\n";
      emit(sim_out, out.str());
    } else if (*plc) {
      const DirectedGraph g = load_graph(plc_graph);
      PlacementStrategy strategy;
      if (plc_strategy == "random") strategy.kind = PlacementKind::Random;
      else if (plc_strategy == "maxspan") strategy.kind = PlacementKind::MaxSpAN;
      else {
        strategy.kind = PlacementKind::CentralityBased;
        strategy.measure = measure_from_name(plc_strategy);
      }
      strategy.n_advs = plc_n_advs;
      const std::vector<int> advs = place(strategy, g, plc_seed);
      std::ostringstream out;
      write_placement_csv(strategy, plc_seed, advs, out);
      emit(plc_out, out.str());
    } else if (*simu) {
      const ExperimentConfig cfg = parse_config(simu_config);
      GraphSpec spec = cfg.graph;
      spec.seed = Rng(simu_seed).substream("graph").next_u64();
      const GenerateResult gen_result =
          generate_strongly_connected(spec, cfg.max_graph_attempts);
      Task task;
      if (cfg.task.kind == TaskConfig::Kind::Quadratic) {
        task = make_quadratic_task(cfg.graph.n, cfg.task.quad_dim, cfg.task.quad_target_std,
                                   Rng(simu_seed).substream("task").next_u64());
      } else {
        SoftmaxTask softmax =
            make_blob_task(cfg.task.blob, Rng(simu_seed).substream("task").next_u64());
        partition_data(softmax, cfg.graph.n, cfg.sim.partition,
                       Rng(simu_seed).substream("shards").next_u64(), cfg.sim.batch_size);
        task = std::move(softmax);
      }
      SimConfig sc = cfg.sim;
      sc.seed = simu_seed;
      RunRecord record;
      if (simu_strategy == "clean") {
        record = run_simulation(gen_result.graph, task, sc);
      } else {
        PlacementStrategy strategy;
        bool found = false;
        for (const auto& s : cfg.strategies)
          if (placement_strategy_name(s) == simu_strategy) {
            strategy = s;
            found = true;
          }
        if (!found) throw InvalidSpec("strategy not in config: " + simu_strategy);
        AttackConfig attack{cfg.epsilon, cfg.t_attack, strategy, cfg.tracker};
        const AttackRun atk = resolve_attack(attack, gen_result.graph, simu_seed);
        record = run_simulation(gen_result.graph, task, sc, &atk);
      }
      std::ostringstream out;
      write_run_csv(record, out);
      emit(simu_out, out.str());
    } else if (*run) {
      ExperimentConfig cfg = parse_config(run_config);
      if (run_seeds > 0) cfg.n_seeds = run_seeds;
      if (!run_out.empty()) cfg.output_dir = run_out;
      const ExperimentManifest manifest = run_experiment(cfg, run_jobs);
      std::cout << "wrote " << manifest.run_dir << " (" << manifest.seeds.size() << " seeds)\n";
    } else if (*rep) {
      report(rep_dir);
      std::cout << "rewrote " << rep_dir << "/aggregate\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
