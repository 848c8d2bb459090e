#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxspan/experiment.hpp"

using namespace maxspan;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Small, fast sweep configuration used by the end-to-end cases.
const char* kSmallConfig = R"({
  "graph": {"family": "er", "n": 8, "p_edge": 0.6},
  "task": {"kind": "softmax", "feature_dim": 4, "n_classes": 3,
           "train_samples": 240, "test_samples": 60},
  "sim": {"batch_size": 8, "n_epochs": 12},
  "attack": {"epsilon": 1.0, "t_attack": 4, "n_advs": 2, "strategies": ["random"]},
  "n_seeds": 2,
  "output_dir": "OUTDIR"
})";

std::string small_config(const std::string& outdir) {
  std::string text = kSmallConfig;
  text.replace(text.find("OUTDIR"), 6, outdir);
  return text;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* stem) : path(fs::temp_directory_path() / stem) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal config expands to the documented defaults") {
  const ExperimentConfig cfg = parse_config_text(R"({"graph": {"family": "dg"}})");
  CHECK(cfg.graph.family == GraphFamily::DirectedGeometric);
  CHECK(cfg.graph.n == 25);
  CHECK(cfg.graph.radius == 0.2);
  CHECK(cfg.task.kind == TaskConfig::Kind::Softmax);
  CHECK(cfg.sim.alpha == 0.05);
  CHECK(cfg.sim.batch_size == 32);
  CHECK(cfg.sim.n_epochs == 100);
  CHECK(cfg.epsilon == 1.0);
  CHECK(cfg.t_attack == 25);
  CHECK(cfg.n_seeds == 20);
  CHECK(cfg.resolved_n_advs() == 5);  // 20% of 25
  REQUIRE(cfg.strategies.size() == 3);
  CHECK(cfg.strategies[0].kind == PlacementKind::Random);
  CHECK(cfg.strategies[1].kind == PlacementKind::CentralityBased);
  CHECK(cfg.strategies[1].measure == CentralityMeasure::Eigenvector);
  CHECK(cfg.strategies[2].kind == PlacementKind::MaxSpAN);
  for (const auto& s : cfg.strategies) CHECK(s.n_advs == 5);
}

TEST_CASE("out-of-range values fail with the key path") {
  try {
    parse_config_text(R"({"graph": {"family": "er", "p_edge": 1.5}})");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("graph.p_edge") != std::string::npos);
  }
}

TEST_CASE("unknown keys fail with the key name") {
  try {
    parse_config_text(R"({"graf": {"family": "er"}})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("graf") != std::string::npos);
  }
  try {
    parse_config_text(R"({"graph": {"family": "er"}, "sim": {"batchsize": 8}})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("sim.batchsize") != std::string::npos);
  }
}

TEST_CASE("config validation catches structural mistakes") {
  CHECK_THROWS_AS(parse_config_text("not json"), ParseError);
  CHECK_THROWS_AS(parse_config_text(R"({"graph": {"family": "nope"}})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"graph": {"family": "er"}, "n_seeds": 0})"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_config_text(
          R"({"graph": {"family": "er"}, "attack": {"t_attack": 200}})"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_config_text(
          R"({"graph": {"family": "er", "n": 4}, "attack": {"n_advs": 4}})"),
      ValidationError);
}

TEST_CASE("config hash ignores output_dir but tracks substantive fields") {
  const ExperimentConfig a = parse_config_text(small_config("a_dir"));
  const ExperimentConfig b = parse_config_text(small_config("b_dir"));
  CHECK(config_hash(a) == config_hash(b));
  ExperimentConfig c = a;
  c.epsilon = 2.5;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("run_experiment writes the documented file layout") {
  const TempDir tmp("maxspan_exp_layout");
  const ExperimentConfig cfg = parse_config_text(small_config(tmp.path.string()));
  const ExperimentManifest manifest = run_experiment(cfg, 2);
  CHECK(manifest.seeds == std::vector<std::uint64_t>{0, 1});
  const fs::path run_dir(manifest.run_dir);
  CHECK(fs::exists(run_dir / "manifest.json"));
  for (const int s : {0, 1}) {
    CHECK(fs::exists(run_dir / std::to_string(s) / "clean.csv"));
    CHECK(fs::exists(run_dir / std::to_string(s) / "random.csv"));
    CHECK(fs::exists(run_dir / std::to_string(s) / "run.json"));
  }
  CHECK(fs::exists(run_dir / "aggregate" / "clean_curve.csv"));
  CHECK(fs::exists(run_dir / "aggregate" / "random_curve.csv"));
  CHECK(fs::exists(run_dir / "aggregate" / "summary.csv"));
  const std::string summary = slurp(run_dir / "aggregate" / "summary.csv");
  CHECK(summary.find("strategy,aal_mean,aal_std,n_seeds,advantage_vs_next_best") == 0);
  CHECK(summary.find("random,") != std::string::npos);
}

TEST_CASE("rerunning the same config is byte-identical") {
  const TempDir tmp_a("maxspan_exp_rerun_a");
  const TempDir tmp_b("maxspan_exp_rerun_b");
  const ExperimentConfig cfg_a = parse_config_text(small_config(tmp_a.path.string()));
  const ExperimentConfig cfg_b = parse_config_text(small_config(tmp_b.path.string()));
  const ExperimentManifest ma = run_experiment(cfg_a, 2);
  const ExperimentManifest mb = run_experiment(cfg_b, 1);  // job count must not matter
  CHECK(ma.config_hash == mb.config_hash);
  for (const char* rel :
       {"0/clean.csv", "0/random.csv", "1/clean.csv", "1/random.csv",
        "aggregate/clean_curve.csv", "aggregate/random_curve.csv", "aggregate/summary.csv"})
    CHECK(slurp(fs::path(ma.run_dir) / rel) == slurp(fs::path(mb.run_dir) / rel));
}

TEST_CASE("report recomputes identical aggregates from stored CSVs") {
  const TempDir tmp("maxspan_exp_report");
  const ExperimentConfig cfg = parse_config_text(small_config(tmp.path.string()));
  const ExperimentManifest manifest = run_experiment(cfg, 2);
  const fs::path agg = fs::path(manifest.run_dir) / "aggregate";
  const std::string clean_before = slurp(agg / "clean_curve.csv");
  const std::string summary_before = slurp(agg / "summary.csv");
  fs::remove_all(agg);
  report(manifest.run_dir);
  CHECK(slurp(agg / "clean_curve.csv") == clean_before);
  CHECK(slurp(agg / "summary.csv") == summary_before);
}

TEST_CASE("quadratic task sweeps run end to end") {
  const TempDir tmp("maxspan_exp_quad");
  const ExperimentConfig cfg = parse_config_text(R"({
    "graph": {"family": "k_out", "n": 6, "k": 3},
    "task": {"kind": "quadratic", "dim": 2},
    "sim": {"n_epochs": 30},
    "attack": {"epsilon": 0.5, "t_attack": 10, "n_advs": 1, "strategies": ["maxspan"]},
    "n_seeds": 2,
    "output_dir": ")" + tmp.path.string() + R"("
  })");
  const ExperimentManifest manifest = run_experiment(cfg, 2);
  const std::string csv = slurp(fs::path(manifest.run_dir) / "0" / "clean.csv");
  CHECK(csv.find("honest_mean_dist_to_opt") != std::string::npos);
}
