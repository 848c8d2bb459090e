#include "maxspan/metrics.hpp"

#include <cmath>

namespace maxspan {

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (const double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double stddev_of(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double attack_accuracy_loss(const RunRecord& clean, const RunRecord& attacked, int t_attack) {
  if (clean.metric.size() != attacked.metric.size())
    throw LengthMismatch("attack_accuracy_loss: series lengths differ");
  const int n_epochs = static_cast<int>(clean.metric.size());
  if (t_attack < 0 || t_attack >= n_epochs)
    throw LengthMismatch("attack_accuracy_loss: t_attack outside the epoch range");
  double aal = 0.0;
  for (int t = t_attack; t < n_epochs; ++t)
    aal += 100.0 * (clean.metric[static_cast<std::size_t>(t)] -
                    attacked.metric[static_cast<std::size_t>(t)]);
  return aal;
}

double attack_advantage(double aal_best, double aal_next) {
  if (aal_next <= 0.0)
    throw NonPositiveBaseline("attack_advantage: undefined for aal_next <= 0");
  return 100.0 * (aal_best - aal_next) / aal_next;
}

AggregateSeries aggregate_series(const std::vector<const RunRecord*>& records) {
  if (records.size() < 2) throw FingerprintMismatch("aggregate needs >= 2 records");
  const std::string& fp = records.front()->fingerprint;
  const std::size_t len = records.front()->metric.size();
  for (const RunRecord* r : records) {
    if (r->fingerprint != fp)
      throw FingerprintMismatch("aggregate: records from different configs");
    if (r->metric.size() != len) throw LengthMismatch("aggregate: series lengths differ");
  }
  AggregateSeries agg;
  agg.mean.resize(len);
  agg.stddev.resize(len);
  agg.ci_low.resize(len);
  agg.ci_high.resize(len);
  const double sqrt_n = std::sqrt(static_cast<double>(records.size()));
  std::vector<double> column(records.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t r = 0; r < records.size(); ++r) column[r] = records[r]->metric[t];
    agg.mean[t] = mean_of(column);
    agg.stddev[t] = stddev_of(column);
    const double half_width = 1.959963984540054 * agg.stddev[t] / sqrt_n;
    agg.ci_low[t] = agg.mean[t] - half_width;
    agg.ci_high[t] = agg.mean[t] + half_width;
  }
  return agg;
}

AalStats aggregate_aal(const std::vector<const RunRecord*>& clean,
                       const std::vector<const RunRecord*>& attacked, int t_attack) {
  if (clean.size() != attacked.size() || clean.empty())
    throw LengthMismatch("aggregate_aal: paired record counts differ");
  std::vector<double> aals;
  aals.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (clean[i]->seed != attacked[i]->seed)
      throw FingerprintMismatch("aggregate_aal: clean/attacked seeds differ");
    aals.push_back(attack_accuracy_loss(*clean[i], *attacked[i], t_attack));
  }
  return {mean_of(aals), stddev_of(aals), static_cast<int>(aals.size())};
}

}  // namespace maxspan
