#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocpc/errors.hpp"

namespace ocpc {

// Trailing window of predicted CVRs for one campaign's competing traffic.
struct CvrHistory {
  std::string campaign_id;
  std::vector<double> observations;  // each in [0,1]
};

struct GapBucket {
  double mean_predicted = 0.0;
  double mean_real = 0.0;
  std::optional<double> ratio;  // mean_predicted / mean_real; nullopt if mean_real = 0
  std::size_t count = 0;
};

// Predicted-vs-realized diagnostic over equal-frequency pCVR buckets,
// ordered by ascending mean_predicted.
struct GapCurve {
  std::vector<GapBucket> buckets;
};

// Piecewise-log CVR calibration: identity below the threshold, logarithmic
// compression above it. Continuous and nondecreasing in p; for p >= tc the
// result stays within [tc, p].
inline double calibrate_cvr(double p, double tc) {
  if (!(tc > 0.0)) fail(Errc::non_positive_threshold, "tc must be > 0");
  if (p < 0.0 || p > 1.0)
    fail(Errc::probability_out_of_range, "pcvr must be in [0,1]");
  if (p < tc) return p;
  return tc * (1.0 + std::log(p / tc));
}

// Same rule with a configurable logarithm base, for sensitivity checks.
inline double calibrate_cvr(double p, double tc, double log_base) {
  if (!(log_base > 0.0) || log_base == 1.0)
    fail(Errc::invalid_spec, "log base must be positive and != 1");
  if (!(tc > 0.0)) fail(Errc::non_positive_threshold, "tc must be > 0");
  if (p < 0.0 || p > 1.0)
    fail(Errc::probability_out_of_range, "pcvr must be in [0,1]");
  if (p < tc) return p;
  return tc * (1.0 + std::log(p / tc) / std::log(log_base));
}

// Trimmed-mean estimate of a campaign's expected CVR: sort, drop
// floor(n * trim_fraction) observations from each end, average the rest.
inline double expected_cvr(const CvrHistory& history,
                           double trim_fraction = 0.10) {
  if (history.observations.empty())
    fail(Errc::empty_history, "campaign " + history.campaign_id);
  if (trim_fraction < 0.0 || trim_fraction >= 0.5)
    fail(Errc::invalid_spec, "trim_fraction must be in [0, 0.5)");
  for (double v : history.observations)
    if (v < 0.0 || v > 1.0)
      fail(Errc::probability_out_of_range,
           "history of campaign " + history.campaign_id);

  std::vector<double> sorted = history.observations;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto cut = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * trim_fraction));
  const double sum =
      std::accumulate(sorted.begin() + cut, sorted.end() - cut, 0.0);
  const double mean = sum / static_cast<double>(n - 2 * cut);
  if (!(mean > 0.0))
    fail(Errc::all_zero_after_trim, "campaign " + history.campaign_id);
  return mean;
}

struct GapSample {
  double predicted = 0.0;
  double realized = 0.0;  // binary outcome or realized rate
};

// Equal-frequency bucketing by predicted value. Bucket sizes differ by at
// most one; the remainder goes to the leading buckets.
inline GapCurve gap_curve(std::span<const GapSample> samples,
                          std::size_t n_buckets = 20) {
  if (samples.empty()) fail(Errc::empty_samples, "gap_curve");
  if (n_buckets < 1) fail(Errc::invalid_spec, "n_buckets must be >= 1");

  std::vector<GapSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GapSample& a, const GapSample& b) {
                     return a.predicted < b.predicted;
                   });

  const std::size_t n = sorted.size();
  n_buckets = std::min(n_buckets, n);
  const std::size_t base = n / n_buckets;
  const std::size_t remainder = n % n_buckets;

  GapCurve curve;
  curve.buckets.reserve(n_buckets);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_buckets; ++b) {
    const std::size_t size = base + (b < remainder ? 1 : 0);
    GapBucket bucket;
    bucket.count = size;
    double sum_pred = 0.0;
    double sum_real = 0.0;
    for (std::size_t i = 0; i < size; ++i, ++pos) {
      sum_pred += sorted[pos].predicted;
      sum_real += sorted[pos].realized;
    }
    bucket.mean_predicted = sum_pred / static_cast<double>(size);
    bucket.mean_real = sum_real / static_cast<double>(size);
    if (bucket.mean_real > 0.0)
      bucket.ratio = bucket.mean_predicted / bucket.mean_real;
    curve.buckets.push_back(bucket);
  }
  return curve;
}

}  // namespace ocpc
