#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maxspan/metrics.hpp"
#include "maxspan/rng.hpp"

using namespace maxspan;

namespace {

RunRecord constant_record(double acc, int n_epochs, std::uint64_t seed = 0,
                          const std::string& fp = "fp") {
  RunRecord r;
  r.fingerprint = fp;
  r.seed = seed;
  r.metric.assign(static_cast<std::size_t>(n_epochs), acc);
  r.loss.assign(static_cast<std::size_t>(n_epochs), 0.0);
  return r;
}

}  // namespace

TEST_CASE("AAL of identical curves is zero") {
  const RunRecord r = constant_record(0.9, 100);
  CHECK(attack_accuracy_loss(r, r, 25) == 0.0);
}

TEST_CASE("AAL of constant 90% vs 80% over epochs 25..99 is 750") {
  const RunRecord clean = constant_record(0.9, 100);
  const RunRecord attacked = constant_record(0.8, 100);
  CHECK(attack_accuracy_loss(clean, attacked, 25) == doctest::Approx(750.0).epsilon(1e-12));
}

TEST_CASE("AAL goes negative when the attack backfires") {
  const RunRecord clean = constant_record(0.8, 50);
  const RunRecord attacked = constant_record(0.85, 50);
  CHECK(attack_accuracy_loss(clean, attacked, 10) < 0.0);
}

TEST_CASE("AAL is additive over disjoint epoch ranges and shift-invariant") {
  Rng rng(4);
  RunRecord clean = constant_record(0.0, 60);
  RunRecord attacked = constant_record(0.0, 60);
  for (int t = 0; t < 60; ++t) {
    clean.metric[static_cast<std::size_t>(t)] = 0.5 + 0.1 * rng.next_double();
    attacked.metric[static_cast<std::size_t>(t)] = 0.4 + 0.1 * rng.next_double();
  }
  const double whole = attack_accuracy_loss(clean, attacked, 0);
  double split = attack_accuracy_loss(clean, attacked, 30);
  for (int t = 0; t < 30; ++t)
    split += 100.0 * (clean.metric[static_cast<std::size_t>(t)] -
                      attacked.metric[static_cast<std::size_t>(t)]);
  CHECK(whole == doctest::Approx(split).epsilon(1e-12));

  RunRecord clean_shift = clean, attacked_shift = attacked;
  for (auto& v : clean_shift.metric) v += 0.05;
  for (auto& v : attacked_shift.metric) v += 0.05;
  CHECK(attack_accuracy_loss(clean_shift, attacked_shift, 20) ==
        doctest::Approx(attack_accuracy_loss(clean, attacked, 20)).epsilon(1e-12));
}

TEST_CASE("AAL validates series alignment") {
  const RunRecord clean = constant_record(0.9, 100);
  const RunRecord shorter = constant_record(0.9, 99);
  CHECK_THROWS_AS(attack_accuracy_loss(clean, shorter, 25), LengthMismatch);
  CHECK_THROWS_AS(attack_accuracy_loss(clean, clean, 100), LengthMismatch);
}

TEST_CASE("attack advantage arithmetic") {
  CHECK(attack_advantage(110.0, 100.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(attack_advantage(100.0, 100.0) == 0.0);
  CHECK(attack_advantage(83.25, 50.0) == doctest::Approx(66.5).epsilon(1e-12));
  CHECK(attack_advantage(109.0, 100.0) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK_THROWS_AS(attack_advantage(10.0, 0.0), NonPositiveBaseline);
  CHECK_THROWS_AS(attack_advantage(10.0, -5.0), NonPositiveBaseline);
}

TEST_CASE("advantage is antisymmetric in sign around equal values") {
  const double up = attack_advantage(105.0, 100.0);
  const double down = attack_advantage(95.0, 100.0);
  CHECK(up > 0.0);
  CHECK(down < 0.0);
  CHECK(up == doctest::Approx(-down).epsilon(1e-12));
}

TEST_CASE("aggregate of identical records has zero spread") {
  const RunRecord a = constant_record(0.7, 10, 0);
  const RunRecord b = constant_record(0.7, 10, 1);
  const AggregateSeries agg = aggregate_series({&a, &b});
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(agg.mean[t] == 0.7);
    CHECK(agg.stddev[t] == 0.0);
    CHECK(agg.ci_low[t] == 0.7);
    CHECK(agg.ci_high[t] == 0.7);
  }
}

TEST_CASE("aggregate means pointwise") {
  const RunRecord a = constant_record(0.4, 5, 0);
  const RunRecord b = constant_record(0.6, 5, 1);
  const AggregateSeries agg = aggregate_series({&a, &b});
  for (const double m : agg.mean) CHECK(m == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("aggregate rejects mismatched fingerprints") {
  const RunRecord a = constant_record(0.5, 5, 0, "fp1");
  const RunRecord b = constant_record(0.5, 5, 1, "fp2");
  CHECK_THROWS_AS(aggregate_series({&a, &b}), FingerprintMismatch);
}

TEST_CASE("CI width shrinks like 1/sqrt(n) on synthetic noise") {
  Rng rng(11);
  std::vector<RunRecord> records;
  for (int s = 0; s < 50; ++s) {
    RunRecord r = constant_record(0.0, 1, static_cast<std::uint64_t>(s));
    r.metric[0] = 0.5 + 0.05 * rng.next_normal();
    records.push_back(r);
  }
  std::vector<const RunRecord*> all, ten;
  for (const auto& r : records) all.push_back(&r);
  for (int s = 0; s < 10; ++s) ten.push_back(&records[static_cast<std::size_t>(s)]);
  const double w50 = aggregate_series(all).ci_high[0] - aggregate_series(all).ci_low[0];
  const double w10 = aggregate_series(ten).ci_high[0] - aggregate_series(ten).ci_low[0];
  // widths scale with sample std / sqrt(n); allow 20% slack for the
  // std estimates differing between the subsample and the full sample
  CHECK(std::abs(w50 / w10 - std::sqrt(10.0 / 50.0)) < 0.2);
}

TEST_CASE("mean of per-seed AALs equals AAL of mean curves") {
  Rng rng(23);
  std::vector<RunRecord> clean, attacked;
  for (int s = 0; s < 8; ++s) {
    RunRecord c = constant_record(0.0, 30, static_cast<std::uint64_t>(s));
    RunRecord a = constant_record(0.0, 30, static_cast<std::uint64_t>(s));
    for (int t = 0; t < 30; ++t) {
      c.metric[static_cast<std::size_t>(t)] = rng.next_double();
      a.metric[static_cast<std::size_t>(t)] = rng.next_double();
    }
    clean.push_back(c);
    attacked.push_back(a);
  }
  std::vector<const RunRecord*> cp, ap;
  for (const auto& r : clean) cp.push_back(&r);
  for (const auto& r : attacked) ap.push_back(&r);
  const AalStats stats = aggregate_aal(cp, ap, 5);
  RunRecord mean_clean = constant_record(0.0, 30);
  RunRecord mean_attacked = constant_record(0.0, 30);
  const AggregateSeries agg_c = aggregate_series(cp);
  const AggregateSeries agg_a = aggregate_series(ap);
  mean_clean.metric = agg_c.mean;
  mean_attacked.metric = agg_a.mean;
  CHECK(stats.mean ==
        doctest::Approx(attack_accuracy_loss(mean_clean, mean_attacked, 5)).epsilon(1e-12));
  CHECK(stats.n_seeds == 8);
}

TEST_CASE("aggregate_aal pairs records by seed") {
  const RunRecord c0 = constant_record(0.9, 10, 0);
  const RunRecord a1 = constant_record(0.8, 10, 1);
  CHECK_THROWS_AS(aggregate_aal({&c0}, {&a1}, 2), FingerprintMismatch);
}
