#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "maxspan/errors.hpp"
#include "maxspan/rng.hpp"

namespace maxspan {

struct Dataset {
  int feature_dim = 0;
  int n_classes = 0;
  std::vector<double> features;  // row-major, size() * feature_dim
  std::vector<int> labels;

  int size() const { return static_cast<int>(labels.size()); }
  std::span<const double> sample(int i) const {
    return {features.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(feature_dim),
            static_cast<std::size_t>(feature_dim)};
  }
};

// f_i(x) = 1/2 ||x - b_i||^2; the optimum over any node subset is the mean
// of that subset's targets, which tests use as an exact oracle.
struct QuadraticTask {
  int dim = 0;
  std::vector<std::vector<double>> targets;  // b_i per node
};

// Linear softmax classifier with cross-entropy loss. Model layout:
// weights for class c at [c*d, (c+1)*d), biases at [C*d, C*d + C).
struct SoftmaxTask {
  int feature_dim = 0;
  int n_classes = 0;
  Dataset train;
  Dataset test;
  std::vector<std::vector<int>> shards;  // per node, sorted train indices

  int model_dim() const { return n_classes * (feature_dim + 1); }
};

using Task = std::variant<QuadraticTask, SoftmaxTask>;

int model_dim(const Task& task);
int node_count(const Task& task);
int shard_size(const Task& task, int node);

struct BlobTaskParams {
  int feature_dim = 16;
  int n_classes = 10;
  int train_samples = 4000;
  int test_samples = 2000;
  double mean_std = 1.0;  // class means ~ N(0, mean_std^2), unit sample noise
};

// Gaussian class-mean blob classification task; means drawn once per seed.
SoftmaxTask make_blob_task(const BlobTaskParams& params, std::uint64_t seed);

// Per-node targets with entries ~ N(0, target_std^2).
QuadraticTask make_quadratic_task(int n_nodes, int dim, double target_std, std::uint64_t seed);

enum class PartitionKind { IID, NonIID };

struct PartitionSpec {
  PartitionKind kind = PartitionKind::IID;
  int classes_per_node = 3;  // NonIID only
};

// Assigns task.shards for n_nodes nodes. IID: random equal-size shards,
// remainder to lowest ids. NonIID: classes_per_node classes per node,
// round-robin over a random class permutation, equal share of each
// assigned class. Throws InsufficientData when a shard would drop below
// batch_size.
void partition_data(SoftmaxTask& task, int n_nodes, const PartitionSpec& partition,
                    std::uint64_t seed, int batch_size);

// Batch positions (indices into the node's shard) drawn uniformly without
// replacement; sorted ascending.
std::vector<int> draw_batch(const Task& task, int node, int batch_size, Rng stream);

// Mini-batch gradient of f_i at x. QuadraticConsensus ignores the batch
// and returns x - b_i exactly.
std::vector<double> local_gradient(const Task& task, int node, const std::vector<double>& x,
                                   const std::vector<int>& batch_positions);

// Mean gradient over the node's whole shard.
std::vector<double> full_shard_gradient(const Task& task, int node,
                                        const std::vector<double>& x);

// The adversary's private poisoned copy; the clean shard is never mutated.
// Quadratic: `data` holds b_adv. Softmax: `data` holds the perturbed flat
// shard features in shard order (labels stay those of the clean shard).
struct PoisonedShard {
  std::vector<double> data;
};

// z <- z + eps * sign(df_i/dz) at the current model (labels untouched);
// for the quadratic task b <- b + eps * sign(b - x).
PoisonedShard fgsm_poison(const Task& task, int node, const std::vector<double>& x, double eps);

// Gradient of f_i on the poisoned shard; batch_positions == nullptr means
// the full shard.
std::vector<double> poisoned_gradient(const Task& task, int node, const PoisonedShard& shard,
                                      const std::vector<double>& x,
                                      const std::vector<int>* batch_positions);

// Per-sample gradient of the cross-entropy loss w.r.t. the features.
std::vector<double> softmax_data_gradient(const SoftmaxTask& task, const std::vector<double>& x,
                                          const double* features, int label);

double dataset_accuracy(const Dataset& data, int feature_dim, int n_classes,
                        const std::vector<double>& x);
double dataset_mean_loss(const Dataset& data, int feature_dim, int n_classes,
                         const std::vector<double>& x);

}  // namespace maxspan
