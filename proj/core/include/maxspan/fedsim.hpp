#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maxspan/graph.hpp"
#include "maxspan/placement.hpp"
#include "maxspan/task.hpp"

namespace maxspan {

enum class Role { Honest, Adversarial };

// What an adversary broadcasts as its tracker value once the attack is
// live. The paper-facing default broadcasts the poisoned gradient; the
// alternative keeps running the honest tracker recursion on poisoned
// gradients.
enum class AdversaryTracker { PoisonedGradient, HonestRecursion };

struct AttackConfig {
  double epsilon = 0.0;
  int t_attack = 0;
  PlacementStrategy strategy;
  AdversaryTracker tracker = AdversaryTracker::PoisonedGradient;
};

struct SimConfig {
  double alpha = 0.05;
  int batch_size = 32;
  int n_epochs = 100;
  PartitionSpec partition;
  std::uint64_t seed = 0;
  double init_std = 0.1;  // x_i^(0) entries ~ N(0, init_std^2)
};

struct NodeState {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> last_grad;  // cached g_i(x^(t), zeta^(t)), same batch as added
  Role role = Role::Honest;
};

// An attack with the adversary set already resolved.
struct AttackRun {
  double epsilon = 0.0;
  int t_attack = 0;
  AdversaryTracker tracker = AdversaryTracker::PoisonedGradient;
  std::vector<int> adversaries;  // ascending
};

AttackRun resolve_attack(const AttackConfig& attack, const DirectedGraph& g,
                         std::uint64_t seed);

struct RunRecord {
  std::string fingerprint;
  std::uint64_t seed = 0;
  bool quadratic = false;
  // Honest-mean test accuracy per epoch (SoftmaxRegression) or honest-mean
  // distance to the honest optimum (QuadraticConsensus).
  std::vector<double> metric;
  std::vector<double> loss;
  std::vector<int> adversaries;
  double d_avg = 0.0;  // NaN when |A| < 2
};

// Batch positions for node i's stochastic gradient at epoch t; a pure
// function of (seed, i, t) so paired clean/attacked runs share draws.
std::vector<int> epoch_batch(const Task& task, const SimConfig& sim, int node, int epoch);

// x^(0) from the seed's init substream, y^(0) = last_grad = g_i(x^(0), zeta^(0)).
NodeState initial_state(const Task& task, const SimConfig& sim, int node, Role role);

// One synchronous S-AB update for an honest node, computed purely from the
// epoch-t snapshot. next_batch is zeta^(t+1).
NodeState honest_step(const Task& task, const DirectedGraph& g, double alpha,
                      const std::vector<NodeState>& snapshot, int i,
                      const std::vector<int>& next_batch);

// Post-attack adversary update: local descent on the FGSM-poisoned shard,
// in-neighbor models ignored.
NodeState adversary_step(const Task& task, const DirectedGraph& g, double alpha,
                         const std::vector<NodeState>& snapshot, int i, double epsilon,
                         AdversaryTracker tracker, const std::vector<int>& next_batch);

// Runs sim.n_epochs synchronous rounds. attack == nullptr (or an empty
// adversary set) means all nodes honest throughout.
RunRecord run_simulation(const DirectedGraph& g, const Task& task, const SimConfig& sim,
                         const AttackRun* attack = nullptr, std::string fingerprint = "");

// `epoch,honest_mean_accuracy,honest_mean_loss` rows (dist_to_opt for the
// quadratic task), 17 significant digits.
void write_run_csv(const RunRecord& record, std::ostream& out);
RunRecord read_run_csv(std::istream& in);

}  // namespace maxspan
