#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ocpc/metrics.hpp"
#include "test_support.hpp"

using namespace ocpc;
using ocpc::test::expect_error;

namespace {

// O(n^2) pairwise oracle: positives vs negatives, ties count one half.
double auc_oracle(const std::vector<LabeledScore>& samples) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (const LabeledScore& pos : samples) {
    if (pos.label == 0) continue;
    for (const LabeledScore& neg : samples) {
      if (neg.label != 0) continue;
      ++pairs;
      if (pos.score > neg.score) wins += 1.0;
      else if (pos.score == neg.score) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// Returns nullopt when no mixed-label group survives removal.
std::optional<double> gauc_oracle(const std::vector<LabeledScore>& samples,
                                  GaucWeight weight_mode) {
  std::map<std::pair<std::string, std::string>, std::vector<LabeledScore>>
      groups;
  for (const LabeledScore& s : samples)
    groups[{s.user_id, s.position_id}].push_back(s);
  double num = 0.0, den = 0.0;
  for (const auto& [key, group] : groups) {
    std::size_t pos = 0;
    for (const LabeledScore& s : group) pos += s.label != 0;
    if (pos == 0 || pos == group.size()) continue;
    const double w = weight_mode == GaucWeight::impressions
                         ? static_cast<double>(group.size())
                         : static_cast<double>(pos);
    num += w * auc_oracle(group);
    den += w;
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::vector<LabeledScore> random_samples(std::mt19937_64& rng, std::size_t n,
                                         int n_users, int n_positions,
                                         bool with_ties) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> user(0, n_users - 1);
  std::uniform_int_distribution<int> pos(0, n_positions - 1);
  std::uniform_int_distribution<int> tick(0, 19);
  std::vector<LabeledScore> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledScore s;
    s.user_id = "u" + std::to_string(user(rng));
    s.position_id = "p" + std::to_string(pos(rng));
    s.score = with_ties ? tick(rng) / 19.0 : unit(rng);
    s.label = unit(rng) < 0.3 ? 1 : 0;
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace

TEST_CASE("auc basics") {
  CHECK(auc(std::vector<LabeledScore>{{"u", "p", 0.9, 1}, {"u", "p", 0.1, 0}}) ==
        1.0);
  CHECK(auc(std::vector<LabeledScore>{{"u", "p", 0.5, 1}, {"u", "p", 0.5, 0}}) ==
        0.5);
  expect_error(Errc::degenerate_labels, [] {
    auc(std::vector<LabeledScore>{{"u", "p", 0.5, 1}, {"u", "p", 0.4, 1}});
  });
}

TEST_CASE("auc matches the pairwise oracle") {
  std::mt19937_64 rng(73);
  for (int round = 0; round < 100; ++round) {
    const auto samples = random_samples(rng, 100, 1, 1, round % 2 == 0);
    std::size_t pos = 0;
    for (const LabeledScore& s : samples) pos += s.label != 0;
    if (pos == 0 || pos == samples.size()) continue;
    CHECK(std::abs(auc(samples) - auc_oracle(samples)) < 1e-12);
  }
}

TEST_CASE("gauc basics") {
  SECTION("single mixed group equals plain auc") {
    const auto samples = std::vector<LabeledScore>{
        {"u0", "p0", 0.9, 1}, {"u0", "p0", 0.3, 0}, {"u0", "p0", 0.5, 1}};
    CHECK(gauc(samples) == auc(samples));
    CHECK(gauc(samples, GaucWeight::clicks) == auc(samples));
  }

  SECTION("click-weighted aggregation") {
    // Group A: AUC 1.0 with 2 clicks; group B: AUC 0.5 with 1 click.
    const std::vector<LabeledScore> samples{
        {"u0", "p0", 0.9, 1}, {"u0", "p0", 0.8, 1}, {"u0", "p0", 0.1, 0},
        {"u1", "p0", 0.5, 1}, {"u1", "p0", 0.5, 0}};
    CHECK(std::abs(gauc(samples, GaucWeight::clicks) - (2.0 * 1.0 + 0.5) / 3.0) <
          1e-12);
  }

  SECTION("single-class groups are removed") {
    const std::vector<LabeledScore> samples{
        {"u0", "p0", 0.9, 1}, {"u0", "p0", 0.1, 0},
        {"u1", "p0", 0.7, 0}, {"u1", "p0", 0.6, 0}};
    CHECK(gauc(samples) == 1.0);
  }

  SECTION("no valid group") {
    const std::vector<LabeledScore> samples{{"u0", "p0", 0.9, 1},
                                            {"u1", "p0", 0.1, 0}};
    expect_error(Errc::no_valid_groups, [&] { gauc(samples); });
  }
}

TEST_CASE("gauc matches the brute-force oracle") {
  std::mt19937_64 rng(79);
  std::uniform_int_distribution<std::size_t> size(2, 1000);
  int rounds_checked = 0;
  while (rounds_checked < 100) {
    const auto samples = random_samples(rng, size(rng), 6, 3, true);
    const GaucWeight mode = rounds_checked % 2 == 0 ? GaucWeight::impressions
                                                    : GaucWeight::clicks;
    const auto expected = gauc_oracle(samples, mode);
    if (!expected) continue;  // all groups single-class; draw again
    CHECK(std::abs(gauc(samples, mode) - *expected) < 1e-9);
    ++rounds_checked;
  }
}

TEST_CASE("gauc is invariant under monotone per-group score transforms") {
  std::mt19937_64 rng(83);
  for (int round = 0; round < 50; ++round) {
    auto samples = random_samples(rng, 200, 4, 2, false);
    double before;
    try {
      before = gauc(samples);
    } catch (const Error&) {
      continue;
    }
    for (LabeledScore& s : samples)
      s.score = std::exp(3.0 * s.score) + (s.user_id == "u1" ? 100.0 : 0.0);
    CHECK(std::abs(gauc(samples) - before) < 1e-12);
  }
}

TEST_CASE("expected-value aggregation") {
  SECTION("one impression contributes its pctr to clicks") {
    const std::vector<ImpressionRecord> ledger{{0.04, 0.01, 50.0, {}, 1.0}};
    const MetricsReport report = aggregate(ledger);
    CHECK(report.impressions == 1.0);
    CHECK(std::abs(report.clicks - 0.04) < 1e-15);
  }

  SECTION("two-impression hand accounting") {
    const std::vector<ImpressionRecord> ledger{{0.1, 0.2, 50.0, {}, 1.0},
                                               {0.05, 0.1, 100.0, {}, 2.0}};
    const MetricsReport r = aggregate(ledger);
    CHECK(std::abs(r.clicks - 0.15) < 1e-12);
    CHECK(std::abs(r.conversions - 0.025) < 1e-12);
    CHECK(std::abs(r.gmv - 1.5) < 1e-12);
    CHECK(std::abs(r.cost - 0.2) < 1e-12);
    REQUIRE(r.rpm);
    CHECK(std::abs(*r.rpm - 100.0) < 1e-9);
    REQUIRE(r.gpm);
    CHECK(std::abs(*r.gpm - 750.0) < 1e-9);
    REQUIRE(r.roi);
    CHECK(std::abs(*r.roi - 7.5) < 1e-9);
    REQUIRE(r.ctr);
    CHECK(std::abs(*r.ctr - 0.075) < 1e-9);
    REQUIRE(r.cvr);
    CHECK(std::abs(*r.cvr - 0.025 / 0.15) < 1e-9);
    REQUIRE(r.ppc);
    CHECK(std::abs(*r.ppc - 0.2 / 0.15) < 1e-9);
  }

  SECTION("dead traffic leaves undefined ratio markers") {
    const std::vector<ImpressionRecord> ledger{{0.0, 0.1, 50.0, {}, 1.0}};
    const MetricsReport r = aggregate(ledger);
    CHECK(r.clicks == 0.0);
    CHECK(r.cost == 0.0);
    CHECK_FALSE(r.cvr.has_value());
    CHECK_FALSE(r.ppc.has_value());
    CHECK_FALSE(r.roi.has_value());
  }

  SECTION("empty ledger") {
    expect_error(Errc::empty_ledger,
                 [] { aggregate(std::vector<ImpressionRecord>{}); });
  }
}

TEST_CASE("totals are additive under merge") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int round = 0; round < 200; ++round) {
    MetricsTotals all, left, right;
    for (int i = 0; i < 40; ++i) {
      const double pctr = 0.2 * unit(rng);
      const double pcvr = 0.2 * unit(rng);
      const double ppb = 100.0 * unit(rng);
      const double price = 3.0 * unit(rng);
      std::optional<double> pasr;
      if (unit(rng) < 0.5) pasr = 0.1 * unit(rng);
      all.add_impression(pctr, pcvr, ppb, pasr, price);
      (i % 2 == 0 ? left : right).add_impression(pctr, pcvr, ppb, pasr, price);
    }
    MetricsTotals merged = left;
    merged.merge(right);
    CHECK(std::abs(merged.clicks - all.clicks) < 1e-12);
    CHECK(std::abs(merged.gmv - all.gmv) < 1e-12);
    CHECK(std::abs(merged.cost - all.cost) < 1e-12);
    CHECK(std::abs(merged.asr_adds - all.asr_adds) < 1e-12);
    CHECK(merged.impressions == all.impressions);
  }
}

TEST_CASE("compare emits signed relative deltas with markers") {
  MetricsTotals base_totals, test_totals;
  base_totals.add_impression(0.1, 0.2, 50.0, {}, 1.0);
  test_totals.add_impression(0.1, 0.2, 50.0, {}, 1.056);
  const MetricsReport base = finalize(base_totals);
  const MetricsReport test = finalize(test_totals);

  const CompareReport self = compare(base, base);
  CHECK(*self.rpm == 0.0);
  CHECK(*self.gpm == 0.0);
  CHECK(*self.roi == 0.0);
  CHECK(*self.ctr == 0.0);

  const CompareReport d = compare(base, test);
  REQUIRE(d.rpm);
  CHECK(std::abs(*d.rpm - 0.056) < 1e-12);

  MetricsTotals free_totals;
  free_totals.add_impression(0.1, 0.2, 50.0, {}, 0.0);  // zero cost baseline
  const CompareReport z = compare(finalize(free_totals), test);
  CHECK_FALSE(z.rpm.has_value());
  CHECK_FALSE(z.roi.has_value());
  CHECK_FALSE(z.ppc.has_value());
  CHECK(z.gpm.has_value());
}

TEST_CASE("outcome classification") {
  auto report = [](double impressions, double gpm, double roi) {
    MetricsReport r;
    r.impressions = impressions;
    r.gpm = gpm;
    r.roi = roi;
    return r;
  };

  // GPM +18.2%, ROI +20.1% -> improved.
  CHECK(classify_outcome(report(100, 100.0, 2.0),
                         report(83.8, 118.2, 2.402)) == Outcome::improved);
  // PV +49.5%, ROI -0.6% -> quantity/quality exchange.
  CHECK(classify_outcome(report(100, 100.0, 2.0),
                         report(149.5, 110.1, 1.988)) ==
        Outcome::quantity_quality_exchange);
  // Everything down -> other.
  CHECK(classify_outcome(report(100, 100.0, 2.0),
                         report(90, 99.0, 1.9)) == Outcome::other);
  // ROI drop larger than the PV gain -> other.
  CHECK(classify_outcome(report(100, 100.0, 2.0),
                         report(105, 110.0, 1.8)) == Outcome::other);
}

TEST_CASE("adjustment histogram") {
  SECTION("identity records all land in the middle bin") {
    std::vector<AdjustmentRecord> records(50, {2.0, 2.0, 0.4});
    const AdjustmentHistogram h = adjustment_histogram(records, 9);
    CHECK(h.counts[h.middle_bin()] == 50);
    CHECK(h.argmax_bin() == h.middle_bin());
  }

  SECTION("boundary ratios land in the outer bins") {
    const std::vector<AdjustmentRecord> records{{2.8, 2.0, 0.4},
                                                {1.2, 2.0, 0.4}};
    const AdjustmentHistogram h = adjustment_histogram(records, 9);
    CHECK(h.counts[8] == 1);
    CHECK(h.counts[0] == 1);
  }

  SECTION("zero adjust range counts as identity") {
    const std::vector<AdjustmentRecord> records{{1.0, 1.0, 0.0}};
    const AdjustmentHistogram h = adjustment_histogram(records, 9);
    CHECK(h.counts[4] == 1);
  }

  SECTION("proportions match a direct-count oracle and sum to one") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<AdjustmentRecord> records;
    for (int i = 0; i < 5000; ++i) {
      const double bid = 0.5 + 3.0 * unit(rng);
      const double r_a = 0.1 + 0.6 * unit(rng);
      const double ratio = 1.0 - r_a + 2.0 * r_a * unit(rng);
      records.push_back({bid * ratio, bid, r_a});
    }
    const AdjustmentHistogram h = adjustment_histogram(records, 9);

    std::vector<std::size_t> oracle(9, 0);
    for (const AdjustmentRecord& r : records) {
      double x = (r.b_star / r.bid - (1.0 - r.r_a)) / (2.0 * r.r_a);
      x = std::clamp(x, 0.0, 1.0);
      auto bin = static_cast<std::size_t>(x * 9.0);
      if (bin > 8) bin = 8;
      ++oracle[bin];
    }
    double total = 0.0;
    for (std::size_t b = 0; b < 9; ++b) {
      CHECK(h.counts[b] == oracle[b]);
      total += h.proportions[b];
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }

  SECTION("errors") {
    expect_error(Errc::empty_records, [] {
      adjustment_histogram(std::vector<AdjustmentRecord>{});
    });
    expect_error(Errc::non_positive_bid, [] {
      adjustment_histogram(std::vector<AdjustmentRecord>{{1.0, 0.0, 0.4}});
    });
  }
}
