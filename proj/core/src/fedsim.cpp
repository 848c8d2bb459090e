#include "maxspan/fedsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace maxspan {

namespace {

// Evaluation metric for one node's model: {accuracy-or-distance, loss}.
struct NodeEval {
  double metric;
  double loss;
};

NodeEval evaluate_node(const Task& task, const std::vector<double>& x,
                       const std::vector<int>& honest) {
  if (const auto* q = std::get_if<QuadraticTask>(&task)) {
    // Honest optimum is the mean of the honest targets (exact for the
    // quadratic loss family).
    std::vector<double> opt(static_cast<std::size_t>(q->dim), 0.0);
    for (const int h : honest) {
      const auto& b = q->targets[static_cast<std::size_t>(h)];
      for (std::size_t j = 0; j < opt.size(); ++j) opt[j] += b[j];
    }
    for (auto& v : opt) v /= static_cast<double>(honest.size());
    double dist2 = 0.0;
    for (std::size_t j = 0; j < opt.size(); ++j) {
      const double d = x[j] - opt[j];
      dist2 += d * d;
    }
    double loss = 0.0;
    for (const int h : honest) {
      const auto& b = q->targets[static_cast<std::size_t>(h)];
      double l = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        const double d = x[j] - b[j];
        l += d * d;
      }
      loss += 0.5 * l;
    }
    return {std::sqrt(dist2), loss / static_cast<double>(honest.size())};
  }
  const auto& s = std::get<SoftmaxTask>(task);
  // Single pass over the test set for both accuracy and loss.
  const int d = s.feature_dim;
  const int C = s.n_classes;
  int correct = 0;
  double total_loss = 0.0;
  std::vector<double> logits(static_cast<std::size_t>(C));
  for (int i = 0; i < s.test.size(); ++i) {
    const double* z =
        s.test.features.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d);
    double max_logit = -1e300;
    int best = 0;
    for (int c = 0; c < C; ++c) {
      double logit = x[static_cast<std::size_t>(C * d + c)];
      const double* w = x.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(d);
      for (int j = 0; j < d; ++j) logit += w[j] * z[j];
      logits[static_cast<std::size_t>(c)] = logit;
      if (logit > max_logit) {
        max_logit = logit;
        best = c;
      }
    }
    const int label = s.test.labels[static_cast<std::size_t>(i)];
    if (best == label) ++correct;
    double denom = 0.0;
    for (int c = 0; c < C; ++c) denom += std::exp(logits[static_cast<std::size_t>(c)] - max_logit);
    total_loss += max_logit - logits[static_cast<std::size_t>(label)] + std::log(denom);
  }
  return {static_cast<double>(correct) / static_cast<double>(s.test.size()),
          total_loss / static_cast<double>(s.test.size())};
}

std::vector<double> mix_models(const DirectedGraph& g, const std::vector<NodeState>& snapshot,
                               int i) {
  const std::size_t p = snapshot[static_cast<std::size_t>(i)].x.size();
  std::vector<double> acc = snapshot[static_cast<std::size_t>(i)].x;
  for (const int j : g.in_neighbors(i)) {
    const auto& xj = snapshot[static_cast<std::size_t>(j)].x;
    for (std::size_t c = 0; c < p; ++c) acc[c] += xj[c];
  }
  const double d_in = static_cast<double>(g.in_degree(i) + 1);
  for (auto& v : acc) v /= d_in;
  return acc;
}

std::vector<double> mix_trackers(const DirectedGraph& g, const std::vector<NodeState>& snapshot,
                                 int i) {
  const std::size_t p = snapshot[static_cast<std::size_t>(i)].y.size();
  std::vector<double> acc(p, 0.0);
  auto add_scaled = [&acc, p](const std::vector<double>& y, double d_out) {
    for (std::size_t c = 0; c < p; ++c) acc[c] += y[c] / d_out;
  };
  add_scaled(snapshot[static_cast<std::size_t>(i)].y,
             static_cast<double>(g.out_degree(i) + 1));
  for (const int j : g.in_neighbors(i))
    add_scaled(snapshot[static_cast<std::size_t>(j)].y,
               static_cast<double>(g.out_degree(j) + 1));
  return acc;
}

}  // namespace

AttackRun resolve_attack(const AttackConfig& attack, const DirectedGraph& g,
                         std::uint64_t seed) {
  AttackRun run;
  run.epsilon = attack.epsilon;
  run.t_attack = attack.t_attack;
  run.tracker = attack.tracker;
  run.adversaries = place(attack.strategy, g, seed);
  return run;
}

std::vector<int> epoch_batch(const Task& task, const SimConfig& sim, int node, int epoch) {
  return draw_batch(task, node, sim.batch_size,
                    Rng(sim.seed).substream("batch", static_cast<std::uint64_t>(node),
                                            static_cast<std::uint64_t>(epoch)));
}

NodeState initial_state(const Task& task, const SimConfig& sim, int node, Role role) {
  NodeState state;
  state.role = role;
  Rng init = Rng(sim.seed).substream("init", static_cast<std::uint64_t>(node));
  state.x.resize(static_cast<std::size_t>(model_dim(task)));
  for (auto& v : state.x) v = sim.init_std * init.next_normal();
  state.last_grad = local_gradient(task, node, state.x, epoch_batch(task, sim, node, 0));
  state.y = state.last_grad;
  return state;
}

NodeState honest_step(const Task& task, const DirectedGraph& g, double alpha,
                      const std::vector<NodeState>& snapshot, int i,
                      const std::vector<int>& next_batch) {
  const NodeState& cur = snapshot[static_cast<std::size_t>(i)];
  NodeState next;
  next.role = cur.role;
  next.x = mix_models(g, snapshot, i);
  for (std::size_t c = 0; c < next.x.size(); ++c) next.x[c] -= alpha * cur.y[c];
  next.last_grad = local_gradient(task, i, next.x, next_batch);
  next.y = mix_trackers(g, snapshot, i);
  // The subtracted term is the CACHED batch gradient added at epoch t;
  // recomputing on a fresh batch would break tracker conservation.
  for (std::size_t c = 0; c < next.y.size(); ++c)
    next.y[c] += next.last_grad[c] - cur.last_grad[c];
  return next;
}

NodeState adversary_step(const Task& task, const DirectedGraph& g, double alpha,
                         const std::vector<NodeState>& snapshot, int i, double epsilon,
                         AdversaryTracker tracker, const std::vector<int>& next_batch) {
  const NodeState& cur = snapshot[static_cast<std::size_t>(i)];
  const PoisonedShard shard = fgsm_poison(task, i, cur.x, epsilon);
  NodeState next;
  next.role = Role::Adversarial;
  // In-neighbor models are ignored: plain local descent on the poisoned shard.
  const std::vector<double> grad = poisoned_gradient(task, i, shard, cur.x, nullptr);
  next.x = cur.x;
  for (std::size_t c = 0; c < next.x.size(); ++c) next.x[c] -= alpha * grad[c];
  const std::vector<double> batch_grad = poisoned_gradient(task, i, shard, next.x, &next_batch);
  if (tracker == AdversaryTracker::PoisonedGradient) {
    next.y = batch_grad;
  } else {
    next.y = mix_trackers(g, snapshot, i);
    for (std::size_t c = 0; c < next.y.size(); ++c)
      next.y[c] += batch_grad[c] - cur.last_grad[c];
  }
  next.last_grad = batch_grad;
  return next;
}

RunRecord run_simulation(const DirectedGraph& g, const Task& task, const SimConfig& sim,
                         const AttackRun* attack, std::string fingerprint) {
  const int n = g.node_count();
  if (node_count(task) != n) throw InvalidSpec("run_simulation: task/graph node count mismatch");
  if (sim.alpha <= 0.0) throw InvalidSpec("run_simulation: alpha must be > 0");
  if (sim.n_epochs < 1) throw InvalidSpec("run_simulation: n_epochs must be >= 1");
  if (!is_strongly_connected(g))
    throw NotStronglyConnected("run_simulation requires a strongly connected graph");

  std::vector<char> is_adv(static_cast<std::size_t>(n), 0);
  if (attack != nullptr)
    for (const int a : attack->adversaries) {
      if (a < 0 || a >= n) throw InvalidSpec("run_simulation: adversary id out of range");
      is_adv[static_cast<std::size_t>(a)] = 1;
    }
  const bool has_attack = attack != nullptr && !attack->adversaries.empty();

  RunRecord record;
  record.fingerprint = std::move(fingerprint);
  record.seed = sim.seed;
  record.quadratic = std::holds_alternative<QuadraticTask>(task);
  if (has_attack) {
    record.adversaries = attack->adversaries;
    record.d_avg = attack->adversaries.size() >= 2
                       ? avg_adversarial_distance(g, attack->adversaries)
                       : std::numeric_limits<double>::quiet_NaN();
  } else {
    record.d_avg = std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<int> all_nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all_nodes[static_cast<std::size_t>(i)] = i;
  std::vector<int> honest_nodes;
  for (int i = 0; i < n; ++i)
    if (!is_adv[static_cast<std::size_t>(i)]) honest_nodes.push_back(i);

  std::vector<NodeState> states;
  states.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    states.push_back(initial_state(
        task, sim, i, is_adv[static_cast<std::size_t>(i)] ? Role::Adversarial : Role::Honest));

  record.metric.reserve(static_cast<std::size_t>(sim.n_epochs));
  record.loss.reserve(static_cast<std::size_t>(sim.n_epochs));
  std::vector<NodeState> next(states.size());
  for (int t = 0; t < sim.n_epochs; ++t) {
    const bool attack_live = has_attack && t >= attack->t_attack;
    for (int i = 0; i < n; ++i) {
      const std::vector<int> batch = epoch_batch(task, sim, i, t + 1);
      if (attack_live && is_adv[static_cast<std::size_t>(i)])
        next[static_cast<std::size_t>(i)] = adversary_step(task, g, sim.alpha, states, i,
                                                           attack->epsilon, attack->tracker, batch);
      else
        next[static_cast<std::size_t>(i)] = honest_step(task, g, sim.alpha, states, i, batch);
    }
    states.swap(next);
    // Pre-attack the adversaries behave honestly, so averaging over every
    // node keeps same-seed runs byte-identical up to t_attack.
    const std::vector<int>& eval_set = attack_live ? honest_nodes : all_nodes;
    double metric_sum = 0.0;
    double loss_sum = 0.0;
    for (const int i : eval_set) {
      const NodeEval e = evaluate_node(task, states[static_cast<std::size_t>(i)].x, eval_set);
      metric_sum += e.metric;
      loss_sum += e.loss;
    }
    record.metric.push_back(metric_sum / static_cast<double>(eval_set.size()));
    record.loss.push_back(loss_sum / static_cast<double>(eval_set.size()));
  }
  return record;
}

void write_run_csv(const RunRecord& record, std::ostream& out) {
  out << (record.quadratic ? "epoch,honest_mean_dist_to_opt,honest_mean_loss\n"
                           : "epoch,honest_mean_accuracy,honest_mean_loss\n");
  char buf[128];
  for (std::size_t t = 0; t < record.metric.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g", t, record.metric[t], record.loss[t]);
    out << buf << "\n";
  }
}

RunRecord read_run_csv(std::istream& in) {
  RunRecord record;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("run CSV: missing header");
  if (line == "epoch,honest_mean_dist_to_opt,honest_mean_loss")
    record.quadratic = true;
  else if (line != "epoch,honest_mean_accuracy,honest_mean_loss")
    throw ParseError("run CSV: unexpected header `" + line + "`");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    std::getline(ls, field, ',');
    record.metric.push_back(std::stod(field));
    std::getline(ls, field, ',');
    record.loss.push_back(std::stod(field));
  }
  return record;
}

}  // namespace maxspan
