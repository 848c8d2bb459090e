#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxspan/fedsim.hpp"
#include "maxspan/metrics.hpp"

namespace maxspan {

inline constexpr const char* kToolVersion = "0.1.0";

struct TaskConfig {
  enum class Kind { Softmax, Quadratic };
  Kind kind = Kind::Softmax;
  BlobTaskParams blob;         // Softmax
  int quad_dim = 5;            // Quadratic
  double quad_target_std = 3.0;
};

struct ExperimentConfig {
  GraphSpec graph;                            // per-run seeds are derived, spec.seed unused
  TaskConfig task;
  SimConfig sim;                              // sim.seed unused; per-run seeds 0..n_seeds-1
  double epsilon = 1.0;
  int t_attack = 25;
  AdversaryTracker tracker = AdversaryTracker::PoisonedGradient;
  int n_advs = 0;                             // 0 = derive from adversarial_fraction
  double adversarial_fraction = 0.2;
  std::vector<PlacementStrategy> strategies;  // n_advs filled in after resolution
  int n_seeds = 20;
  std::string output_dir = "out";
  int max_graph_attempts = 100000;

  int resolved_n_advs() const;
};

// Strict config parsing: unknown keys raise ParseError, out-of-range values
// raise ValidationError, both naming the offending key path.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical JSON of the fully resolved config (defaults expanded).
std::string resolved_config_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct ExperimentManifest {
  std::string config_hash;
  std::string run_dir;  // <output_dir>/<config_hash>
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> graph_seeds_used;  // after connectivity retries
};

// Runs the full sweep: per seed one strongly connected graph, shared
// shards/initialization, one clean run, one attacked run per strategy;
// writes per-run CSVs, aggregate CSVs and manifest.json under
// <output_dir>/<config_hash>/. jobs <= 0 means: MAXSPAN_SIM_JOBS env var,
// else hardware concurrency.
ExperimentManifest run_experiment(const ExperimentConfig& cfg, int jobs = 0);

// Recomputes the aggregate CSVs of an existing run directory from the
// stored per-run CSVs, without re-simulating.
void report(const std::string& run_dir);

// Write-temp-then-rename so parallel writers never expose partial files.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace maxspan
