#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ocpc/errors.hpp"

namespace ocpc {

struct LabeledScore {
  std::string user_id;
  std::string position_id;
  double score = 0.0;
  int label = 0;  // binary
};

// Mann-Whitney AUC with ties counted one half: the probability that a random
// positive outranks a random negative.
inline double auc(std::span<const LabeledScore> samples) {
  std::size_t n_pos = 0;
  for (const LabeledScore& s : samples) n_pos += s.label != 0;
  const std::size_t n_neg = samples.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    fail(Errc::degenerate_labels, "need both labels for AUC");

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].score < samples[b].score;
  });

  // Average ranks over tie groups, summed for positives.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           samples[order[j]].score == samples[order[i]].score)
      ++j;
    const double avg_rank = static_cast<double>(i + j + 1) / 2.0;  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (samples[order[k]].label != 0) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

enum class GaucWeight { impressions, clicks };

// Group AUC: AUC per (user, position), single-class groups removed, weighted
// mean with group impression counts or click (positive) counts as weights.
inline double gauc(std::span<const LabeledScore> samples,
                   GaucWeight weight_mode = GaucWeight::impressions) {
  std::map<std::pair<std::string, std::string>, std::vector<LabeledScore>>
      groups;
  for (const LabeledScore& s : samples)
    groups[{s.user_id, s.position_id}].push_back(s);

  double weighted_sum = 0.0;
  double weight_total = 0.0;
  for (const auto& [key, group] : groups) {
    std::size_t n_pos = 0;
    for (const LabeledScore& s : group) n_pos += s.label != 0;
    if (n_pos == 0 || n_pos == group.size()) continue;  // single-class group
    const double w = weight_mode == GaucWeight::impressions
                         ? static_cast<double>(group.size())
                         : static_cast<double>(n_pos);
    weighted_sum += w * auc(group);
    weight_total += w;
  }
  if (weight_total <= 0.0)
    fail(Errc::no_valid_groups, "no mixed-label (user, position) group");
  return weighted_sum / weight_total;
}

// Expected-value accumulator. Each winning impression contributes its pCTR
// to clicks, pCTR * pCVR to conversions, and so on; nothing is sampled.
struct MetricsTotals {
  double impressions = 0.0;
  double clicks = 0.0;
  double conversions = 0.0;
  double gmv = 0.0;
  double cost = 0.0;
  double asr_adds = 0.0;
  bool has_asr = false;

  void add_impression(double pctr, double pcvr, double ppb,
                      std::optional<double> pasr, double price_per_click) {
    impressions += 1.0;
    clicks += pctr;
    conversions += pctr * pcvr;
    gmv += pctr * pcvr * ppb;
    cost += pctr * price_per_click;
    if (pasr) {
      asr_adds += pctr * *pasr;
      has_asr = true;
    }
  }

  void merge(const MetricsTotals& other) {
    impressions += other.impressions;
    clicks += other.clicks;
    conversions += other.conversions;
    gmv += other.gmv;
    cost += other.cost;
    asr_adds += other.asr_adds;
    has_asr = has_asr || other.has_asr;
  }
};

// Aggregated business metrics. Ratios with a zero denominator are explicit
// markers (nullopt), never silent zeros, so comparison code can tell "no
// data" from "zero performance".
struct MetricsReport {
  double impressions = 0.0;
  double clicks = 0.0;
  double conversions = 0.0;
  double gmv = 0.0;
  double cost = 0.0;
  double asr_adds = 0.0;
  std::optional<double> rpm;  // 1000 * cost / impressions
  std::optional<double> gpm;  // 1000 * gmv / impressions
  std::optional<double> roi;  // gmv / cost
  std::optional<double> ctr;  // clicks / impressions
  std::optional<double> cvr;  // conversions / clicks
  std::optional<double> ppc;  // cost / clicks
  std::optional<double> asr;  // asr_adds / clicks
};

inline MetricsReport finalize(const MetricsTotals& totals) {
  MetricsReport report;
  report.impressions = totals.impressions;
  report.clicks = totals.clicks;
  report.conversions = totals.conversions;
  report.gmv = totals.gmv;
  report.cost = totals.cost;
  report.asr_adds = totals.asr_adds;
  if (totals.impressions > 0.0) {
    report.rpm = 1000.0 * totals.cost / totals.impressions;
    report.gpm = 1000.0 * totals.gmv / totals.impressions;
    report.ctr = totals.clicks / totals.impressions;
  }
  if (totals.cost > 0.0) report.roi = totals.gmv / totals.cost;
  if (totals.clicks > 0.0) {
    report.cvr = totals.conversions / totals.clicks;
    report.ppc = totals.cost / totals.clicks;
    if (totals.has_asr) report.asr = totals.asr_adds / totals.clicks;
  }
  return report;
}

struct ImpressionRecord {
  double pctr = 0.0;
  double pcvr = 0.0;
  double ppb = 0.0;
  std::optional<double> pasr;
  double price_per_click = 0.0;
};

inline MetricsReport aggregate(std::span<const ImpressionRecord> ledger) {
  if (ledger.empty()) fail(Errc::empty_ledger, "aggregate");
  MetricsTotals totals;
  for (const ImpressionRecord& r : ledger)
    totals.add_impression(r.pctr, r.pcvr, r.ppb, r.pasr, r.price_per_click);
  return finalize(totals);
}

// Signed relative change per metric; nullopt marks a zero or undefined
// baseline (the ZeroBaseline marker).
struct CompareReport {
  std::optional<double> gmv, cost, pv, clicks, conversions;
  std::optional<double> rpm, gpm, roi, ctr, cvr, ppc, asr;

  // Canonical presentation order.
  std::vector<std::pair<std::string, std::optional<double>>> items() const {
    return {{"RPM", rpm}, {"GPM", gpm},     {"ROI", roi},
            {"CTR", ctr}, {"CVR", cvr},     {"PPC", ppc},
            {"ASR", asr}, {"GMV", gmv},     {"Cost", cost},
            {"PV", pv},   {"Clicks", clicks}, {"Conv", conversions}};
  }
};

namespace detail {

inline std::optional<double> rel_delta(std::optional<double> base,
                                       std::optional<double> test) {
  if (!base || *base == 0.0 || !test) return std::nullopt;
  return (*test - *base) / *base;
}

inline std::optional<double> rel_delta(double base, double test) {
  if (base == 0.0) return std::nullopt;
  return (test - base) / base;
}

}  // namespace detail

inline CompareReport compare(const MetricsReport& base,
                             const MetricsReport& test) {
  CompareReport d;
  d.gmv = detail::rel_delta(base.gmv, test.gmv);
  d.cost = detail::rel_delta(base.cost, test.cost);
  d.pv = detail::rel_delta(base.impressions, test.impressions);
  d.clicks = detail::rel_delta(base.clicks, test.clicks);
  d.conversions = detail::rel_delta(base.conversions, test.conversions);
  d.rpm = detail::rel_delta(base.rpm, test.rpm);
  d.gpm = detail::rel_delta(base.gpm, test.gpm);
  d.roi = detail::rel_delta(base.roi, test.roi);
  d.ctr = detail::rel_delta(base.ctr, test.ctr);
  d.cvr = detail::rel_delta(base.cvr, test.cvr);
  d.ppc = detail::rel_delta(base.ppc, test.ppc);
  d.asr = detail::rel_delta(base.asr, test.asr);
  return d;
}

// Outcome classes for per-campaign (and per-category) comparisons: both GPM
// and ROI up; or traffic gained faster than ROI dropped; or neither.
enum class Outcome { improved, quantity_quality_exchange, other };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::improved: return "Improved";
    case Outcome::quantity_quality_exchange: return "QuantityQualityExchange";
    case Outcome::other: return "Other";
  }
  return "Other";
}

inline Outcome classify_outcome(const MetricsReport& base,
                                const MetricsReport& test) {
  const CompareReport d = compare(base, test);
  if (d.gpm && d.roi && *d.gpm > 0.0 && *d.roi > 0.0) return Outcome::improved;
  if (d.roi && d.pv && *d.roi < 0.0 && *d.pv > 0.0 && *d.pv > -*d.roi)
    return Outcome::quantity_quality_exchange;
  return Outcome::other;
}

struct AdjustmentRecord {
  double b_star = 0.0;
  double bid = 0.0;
  double r_a = 0.0;
};

// Distribution of b*/b over equal-width bins of the normalized adjustment
// axis [1 - r_a, 1 + r_a] (per-record r_a). The middle bin holds b* = b.
struct AdjustmentHistogram {
  std::vector<std::size_t> counts;
  std::vector<double> proportions;
  std::size_t total = 0;

  std::size_t middle_bin() const { return counts.size() / 2; }
  std::size_t argmax_bin() const {
    return static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
};

inline AdjustmentHistogram adjustment_histogram(
    std::span<const AdjustmentRecord> records, std::size_t n_bins = 9) {
  if (records.empty()) fail(Errc::empty_records, "adjustment_histogram");
  if (n_bins < 1) fail(Errc::invalid_spec, "n_bins must be >= 1");

  AdjustmentHistogram hist;
  hist.counts.assign(n_bins, 0);
  for (const AdjustmentRecord& r : records) {
    if (!(r.bid > 0.0)) fail(Errc::non_positive_bid, "adjustment_histogram");
    if (r.r_a < 0.0 || r.r_a >= 1.0)
      fail(Errc::invalid_spec, "adjust_range must be in [0,1)");
    double x = 0.5;
    if (r.r_a > 0.0) {
      x = (r.b_star / r.bid - (1.0 - r.r_a)) / (2.0 * r.r_a);
      x = std::clamp(x, 0.0, 1.0);
    }
    auto bin = static_cast<std::size_t>(x * static_cast<double>(n_bins));
    if (bin >= n_bins) bin = n_bins - 1;
    ++hist.counts[bin];
  }
  hist.total = records.size();
  hist.proportions.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b)
    hist.proportions[b] =
        static_cast<double>(hist.counts[b]) / static_cast<double>(hist.total);
  return hist;
}

}  // namespace ocpc
