#pragma once

#include <vector>

#include "maxspan/fedsim.hpp"

namespace maxspan {

// AAL in percentage points x epochs: sum over epochs t_attack..end of
// 100 * (clean - attacked).
double attack_accuracy_loss(const RunRecord& clean, const RunRecord& attacked, int t_attack);

// 100 * (aal_best - aal_next) / aal_next. Throws NonPositiveBaseline when
// aal_next <= 0 (the ratio is meaningless there).
double attack_advantage(double aal_best, double aal_next);

struct AggregateSeries {
  std::vector<double> mean;
  std::vector<double> stddev;   // sample standard deviation
  std::vector<double> ci_low;   // normal-approximation 95% CI
  std::vector<double> ci_high;
};

// Pointwise statistics of the metric series across seeds. All records must
// share a fingerprint. Needs >= 2 records.
AggregateSeries aggregate_series(const std::vector<const RunRecord*>& records);

struct AalStats {
  double mean = 0.0;
  double stddev = 0.0;
  int n_seeds = 0;
};

// Per-seed AALs of paired clean/attacked records, reduced to mean +- std.
AalStats aggregate_aal(const std::vector<const RunRecord*>& clean,
                       const std::vector<const RunRecord*>& attacked, int t_attack);

double mean_of(const std::vector<double>& values);
double stddev_of(const std::vector<double>& values);

}  // namespace maxspan
