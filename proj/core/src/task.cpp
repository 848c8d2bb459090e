#include "maxspan/task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maxspan {

namespace {

// Numerically stable per-sample softmax cross-entropy. Writes the class
// probabilities into probs and returns the loss.
double softmax_probs(int d, int C, const double* z, int label, const std::vector<double>& x,
                     std::vector<double>& probs) {
  probs.resize(static_cast<std::size_t>(C));
  double max_logit = -1e300;
  for (int c = 0; c < C; ++c) {
    double logit = x[static_cast<std::size_t>(C * d + c)];
    const double* w = x.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(d);
    for (int j = 0; j < d; ++j) logit += w[j] * z[j];
    probs[static_cast<std::size_t>(c)] = logit;
    max_logit = std::max(max_logit, logit);
  }
  double denom = 0.0;
  for (int c = 0; c < C; ++c) {
    probs[static_cast<std::size_t>(c)] = std::exp(probs[static_cast<std::size_t>(c)] - max_logit);
    denom += probs[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < C; ++c) probs[static_cast<std::size_t>(c)] /= denom;
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));
}

// Accumulates the model gradient of one sample, scaled by `weight`.
void accumulate_model_gradient(int d, int C, const double* z, int label,
                               const std::vector<double>& probs, double weight,
                               std::vector<double>& grad) {
  for (int c = 0; c < C; ++c) {
    const double coeff =
        weight * (probs[static_cast<std::size_t>(c)] - (c == label ? 1.0 : 0.0));
    double* gw = grad.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(d);
    for (int j = 0; j < d; ++j) gw[j] += coeff * z[j];
    grad[static_cast<std::size_t>(C * d + c)] += coeff;
  }
}

std::vector<double> softmax_mean_gradient(const SoftmaxTask& task, const std::vector<double>& x,
                                          const double* features, const int* labels,
                                          const int* positions, int count) {
  const int d = task.feature_dim;
  const int C = task.n_classes;
  std::vector<double> grad(static_cast<std::size_t>(task.model_dim()), 0.0);
  std::vector<double> probs;
  const double weight = 1.0 / static_cast<double>(count);
  for (int i = 0; i < count; ++i) {
    const int row = positions ? positions[i] : i;
    const double* z = features + static_cast<std::size_t>(row) * static_cast<std::size_t>(d);
    softmax_probs(d, C, z, labels[row], x, probs);
    accumulate_model_gradient(d, C, z, labels[row], probs, weight, grad);
  }
  return grad;
}

}  // namespace

int model_dim(const Task& task) {
  if (const auto* q = std::get_if<QuadraticTask>(&task)) return q->dim;
  return std::get<SoftmaxTask>(task).model_dim();
}

int node_count(const Task& task) {
  if (const auto* q = std::get_if<QuadraticTask>(&task))
    return static_cast<int>(q->targets.size());
  return static_cast<int>(std::get<SoftmaxTask>(task).shards.size());
}

int shard_size(const Task& task, int node) {
  if (std::holds_alternative<QuadraticTask>(task)) return 1;
  return static_cast<int>(
      std::get<SoftmaxTask>(task).shards[static_cast<std::size_t>(node)].size());
}

SoftmaxTask make_blob_task(const BlobTaskParams& params, std::uint64_t seed) {
  if (params.feature_dim < 1 || params.n_classes < 2 || params.train_samples < params.n_classes ||
      params.test_samples < 1)
    throw InvalidSpec("blob task parameters out of range");
  SoftmaxTask task;
  task.feature_dim = params.feature_dim;
  task.n_classes = params.n_classes;
  Rng rng(seed);

  Rng mean_stream = rng.substream("blob_means");
  std::vector<double> means(static_cast<std::size_t>(params.n_classes * params.feature_dim));
  for (auto& m : means) m = params.mean_std * mean_stream.next_normal();

  auto fill = [&](Dataset& data, int n_samples, Rng stream) {
    data.feature_dim = params.feature_dim;
    data.n_classes = params.n_classes;
    data.features.resize(static_cast<std::size_t>(n_samples) *
                         static_cast<std::size_t>(params.feature_dim));
    data.labels.resize(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
      const int c = i % params.n_classes;  // balanced classes
      data.labels[static_cast<std::size_t>(i)] = c;
      double* row = data.features.data() +
                    static_cast<std::size_t>(i) * static_cast<std::size_t>(params.feature_dim);
      const double* mu =
          means.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(params.feature_dim);
      for (int j = 0; j < params.feature_dim; ++j) row[j] = mu[j] + stream.next_normal();
    }
  };
  fill(task.train, params.train_samples, rng.substream("blob_train"));
  fill(task.test, params.test_samples, rng.substream("blob_test"));
  return task;
}

QuadraticTask make_quadratic_task(int n_nodes, int dim, double target_std, std::uint64_t seed) {
  if (n_nodes < 1 || dim < 1) throw InvalidSpec("quadratic task parameters out of range");
  QuadraticTask task;
  task.dim = dim;
  task.targets.resize(static_cast<std::size_t>(n_nodes));
  Rng rng(seed);
  for (int i = 0; i < n_nodes; ++i) {
    Rng stream = rng.substream("quadratic_target", static_cast<std::uint64_t>(i));
    auto& b = task.targets[static_cast<std::size_t>(i)];
    b.resize(static_cast<std::size_t>(dim));
    for (auto& v : b) v = target_std * stream.next_normal();
  }
  return task;
}

void partition_data(SoftmaxTask& task, int n_nodes, const PartitionSpec& partition,
                    std::uint64_t seed, int batch_size) {
  const int total = task.train.size();
  if (n_nodes < 1) throw InvalidSpec("partition_data: n_nodes must be >= 1");
  if (total < n_nodes * batch_size)
    throw InsufficientData("partition_data: dataset smaller than n_nodes * batch_size");
  Rng rng = Rng(seed).substream("partition");
  task.shards.assign(static_cast<std::size_t>(n_nodes), {});

  if (partition.kind == PartitionKind::IID) {
    std::vector<int> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const int base = total / n_nodes;
    const int remainder = total % n_nodes;
    std::size_t cursor = 0;
    for (int i = 0; i < n_nodes; ++i) {
      const int take = base + (i < remainder ? 1 : 0);
      auto& shard = task.shards[static_cast<std::size_t>(i)];
      shard.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                   order.begin() + static_cast<std::ptrdiff_t>(cursor + static_cast<std::size_t>(take)));
      std::sort(shard.begin(), shard.end());
      cursor += static_cast<std::size_t>(take);
    }
  } else {
    const int C = task.n_classes;
    if (partition.classes_per_node < 1 || partition.classes_per_node > C)
      throw InvalidSpec("partition_data: classes_per_node must be in [1, C]");
    std::vector<int> perm(static_cast<std::size_t>(C));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    // Round-robin class assignment over the permutation.
    std::vector<std::vector<int>> nodes_of_class(static_cast<std::size_t>(C));
    int cursor = 0;
    for (int i = 0; i < n_nodes; ++i)
      for (int j = 0; j < partition.classes_per_node; ++j) {
        const int c = perm[static_cast<std::size_t>(cursor % C)];
        ++cursor;
        nodes_of_class[static_cast<std::size_t>(c)].push_back(i);
      }
    std::vector<std::vector<int>> samples_of_class(static_cast<std::size_t>(C));
    for (int s = 0; s < total; ++s)
      samples_of_class[static_cast<std::size_t>(task.train.labels[static_cast<std::size_t>(s)])]
          .push_back(s);
    for (int c = 0; c < C; ++c) {
      auto& holders = nodes_of_class[static_cast<std::size_t>(c)];
      if (holders.empty()) continue;
      auto samples = samples_of_class[static_cast<std::size_t>(c)];
      rng.substream("class_split", static_cast<std::uint64_t>(c)).shuffle(samples);
      const int per = static_cast<int>(samples.size()) / static_cast<int>(holders.size());
      const int rem = static_cast<int>(samples.size()) % static_cast<int>(holders.size());
      std::size_t pos = 0;
      for (std::size_t h = 0; h < holders.size(); ++h) {
        const int take = per + (static_cast<int>(h) < rem ? 1 : 0);
        auto& shard = task.shards[static_cast<std::size_t>(holders[h])];
        shard.insert(shard.end(), samples.begin() + static_cast<std::ptrdiff_t>(pos),
                     samples.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(take)));
        pos += static_cast<std::size_t>(take);
      }
    }
    for (auto& shard : task.shards) std::sort(shard.begin(), shard.end());
  }

  for (const auto& shard : task.shards)
    if (static_cast<int>(shard.size()) < batch_size)
      throw InsufficientData("partition_data: a shard is smaller than batch_size");
}

std::vector<int> draw_batch(const Task& task, int node, int batch_size, Rng stream) {
  if (std::holds_alternative<QuadraticTask>(task)) return {};
  const auto& s = std::get<SoftmaxTask>(task);
  const int size = static_cast<int>(s.shards[static_cast<std::size_t>(node)].size());
  if (size == 0) throw InsufficientData("draw_batch: empty shard");
  std::vector<int> positions =
      stream.sample_without_replacement(size, std::min(batch_size, size));
  std::sort(positions.begin(), positions.end());
  return positions;
}

std::vector<double> local_gradient(const Task& task, int node, const std::vector<double>& x,
                                   const std::vector<int>& batch_positions) {
  if (const auto* q = std::get_if<QuadraticTask>(&task)) {
    const auto& b = q->targets[static_cast<std::size_t>(node)];
    std::vector<double> grad(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) grad[j] = x[j] - b[j];
    return grad;
  }
  const auto& s = std::get<SoftmaxTask>(task);
  const auto& shard = s.shards[static_cast<std::size_t>(node)];
  std::vector<int> rows(batch_positions.size());
  for (std::size_t i = 0; i < batch_positions.size(); ++i)
    rows[i] = shard[static_cast<std::size_t>(batch_positions[i])];
  return softmax_mean_gradient(s, x, s.train.features.data(), s.train.labels.data(),
                               rows.data(), static_cast<int>(rows.size()));
}

std::vector<double> full_shard_gradient(const Task& task, int node,
                                        const std::vector<double>& x) {
  if (std::holds_alternative<QuadraticTask>(task)) return local_gradient(task, node, x, {});
  const auto& s = std::get<SoftmaxTask>(task);
  const auto& shard = s.shards[static_cast<std::size_t>(node)];
  return softmax_mean_gradient(s, x, s.train.features.data(), s.train.labels.data(),
                               shard.data(), static_cast<int>(shard.size()));
}

std::vector<double> softmax_data_gradient(const SoftmaxTask& task, const std::vector<double>& x,
                                          const double* features, int label) {
  const int d = task.feature_dim;
  const int C = task.n_classes;
  std::vector<double> probs;
  softmax_probs(d, C, features, label, x, probs);
  std::vector<double> grad(static_cast<std::size_t>(d), 0.0);
  for (int c = 0; c < C; ++c) {
    const double coeff = probs[static_cast<std::size_t>(c)] - (c == label ? 1.0 : 0.0);
    const double* w = x.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(d);
    for (int j = 0; j < d; ++j) grad[static_cast<std::size_t>(j)] += coeff * w[j];
  }
  return grad;
}

PoisonedShard fgsm_poison(const Task& task, int node, const std::vector<double>& x, double eps) {
  if (eps < 0.0) throw InvalidSpec("fgsm_poison: eps must be >= 0");
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  if (const auto* q = std::get_if<QuadraticTask>(&task)) {
    const auto& b = q->targets[static_cast<std::size_t>(node)];
    PoisonedShard shard;
    shard.data.resize(b.size());
    for (std::size_t j = 0; j < b.size(); ++j)
      shard.data[j] = b[j] + eps * sign(b[j] - x[j]);  // grad_b f = b - x
    return shard;
  }
  const auto& s = std::get<SoftmaxTask>(task);
  const auto& node_shard = s.shards[static_cast<std::size_t>(node)];
  const int d = s.feature_dim;
  PoisonedShard shard;
  shard.data.resize(node_shard.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < node_shard.size(); ++i) {
    const double* z = s.train.features.data() +
                      static_cast<std::size_t>(node_shard[i]) * static_cast<std::size_t>(d);
    const int label = s.train.labels[static_cast<std::size_t>(node_shard[i])];
    const std::vector<double> g = softmax_data_gradient(s, x, z, label);
    double* out = shard.data.data() + i * static_cast<std::size_t>(d);
    for (int j = 0; j < d; ++j) out[j] = z[j] + eps * sign(g[static_cast<std::size_t>(j)]);
  }
  return shard;
}

std::vector<double> poisoned_gradient(const Task& task, int node, const PoisonedShard& shard,
                                      const std::vector<double>& x,
                                      const std::vector<int>* batch_positions) {
  if (const auto* q = std::get_if<QuadraticTask>(&task)) {
    (void)node;
    std::vector<double> grad(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) grad[j] = x[j] - shard.data[j];
    return grad;
  }
  const auto& s = std::get<SoftmaxTask>(task);
  const auto& node_shard = s.shards[static_cast<std::size_t>(node)];
  // Labels come from the clean shard; only features were perturbed.
  std::vector<int> labels(node_shard.size());
  for (std::size_t i = 0; i < node_shard.size(); ++i)
    labels[i] = s.train.labels[static_cast<std::size_t>(node_shard[i])];
  if (batch_positions == nullptr)
    return softmax_mean_gradient(s, x, shard.data.data(), labels.data(), nullptr,
                                 static_cast<int>(node_shard.size()));
  return softmax_mean_gradient(s, x, shard.data.data(), labels.data(),
                               batch_positions->data(),
                               static_cast<int>(batch_positions->size()));
}

double dataset_accuracy(const Dataset& data, int feature_dim, int n_classes,
                        const std::vector<double>& x) {
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) {
    const double* z = data.features.data() +
                      static_cast<std::size_t>(i) * static_cast<std::size_t>(feature_dim);
    int best = 0;
    double best_logit = -1e300;
    for (int c = 0; c < n_classes; ++c) {
      double logit = x[static_cast<std::size_t>(n_classes * feature_dim + c)];
      const double* w =
          x.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(feature_dim);
      for (int j = 0; j < feature_dim; ++j) logit += w[j] * z[j];
      if (logit > best_logit) {
        best_logit = logit;
        best = c;
      }
    }
    if (best == data.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double dataset_mean_loss(const Dataset& data, int feature_dim, int n_classes,
                         const std::vector<double>& x) {
  double total = 0.0;
  std::vector<double> probs;
  for (int i = 0; i < data.size(); ++i) {
    const double* z = data.features.data() +
                      static_cast<std::size_t>(i) * static_cast<std::size_t>(feature_dim);
    total += softmax_probs(feature_dim, n_classes, z, data.labels[static_cast<std::size_t>(i)],
                           x, probs);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace maxspan
