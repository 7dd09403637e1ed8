#pragma once

#include <algorithm>
#include <cmath>

#include "ocpc/errors.hpp"

namespace ocpc {

// Feasible bid region for one candidate under the ROI constraint, plus the
// induced rank-score region (score = pctr * bid).
struct BidBounds {
  double lower_bid = 0.0;
  double upper_bid = 0.0;
  double lower_score = 0.0;
  double upper_score = 0.0;
};

// Expected ROI of a single click: conversion probability times order value
// over the click price.
inline double single_click_roi(double pcvr, double ppb, double bid) {
  if (!(bid > 0.0)) fail(Errc::non_positive_bid, "single_click_roi");
  return pcvr * ppb / bid;
}

// Campaign-level ROI across clicks: the per-click conversion probability is
// replaced by its expectation over the campaign's traffic.
inline double campaign_roi(double expected_cvr, double ppb, double bid) {
  if (!(bid > 0.0)) fail(Errc::non_positive_bid, "campaign_roi");
  return expected_cvr * ppb / bid;
}

// Per-request traffic quality relative to the campaign baseline. Raising the
// bid by at most this factor keeps campaign ROI from falling.
inline double quality_ratio(double pcvr, double expected_cvr) {
  if (!(expected_cvr > 0.0))
    fail(Errc::non_positive_expected_cvr, "quality_ratio");
  return pcvr / expected_cvr;
}

// Bid optimization boundaries. High-quality traffic (ratio >= 1) may raise
// the bid up to min(1 + r_a, ratio); low-quality traffic may be depressed
// down to 1 - r_a. Without authorization the region collapses to the bid.
inline BidBounds bid_bounds(double bid, double pctr, double ratio, double r_a,
                            bool opt_authorized = true) {
  if (!(bid > 0.0)) fail(Errc::non_positive_bid, "bid_bounds");
  if (r_a < 0.0 || r_a >= 1.0)
    fail(Errc::invalid_spec, "adjust_range must be in [0,1)");
  if (ratio < 0.0) fail(Errc::negative_input, "quality ratio must be >= 0");
  if (pctr < 0.0 || pctr > 1.0)
    fail(Errc::probability_out_of_range, "pctr must be in [0,1]");

  BidBounds bounds;
  if (!opt_authorized) {
    bounds.lower_bid = bid;
    bounds.upper_bid = bid;
  } else if (ratio < 1.0) {
    bounds.lower_bid = bid * (1.0 - r_a);
    bounds.upper_bid = bid;
  } else {
    bounds.lower_bid = bid;
    bounds.upper_bid = bid * std::min(1.0 + r_a, ratio);
  }
  bounds.lower_score = pctr * bounds.lower_bid;
  bounds.upper_score = pctr * bounds.upper_bid;
  return bounds;
}

// Smooth adjustment curve (x^w - 1) / (x^w + 1): zero at x = 1, increasing
// for w > 0, bounded in (-1, 1).
inline double sigma(double x, double w) {
  if (x < 0.0) fail(Errc::negative_input, "sigma");
  if (!(w > 0.0)) fail(Errc::non_positive_exponent, "sigma");
  const double xw = std::pow(x, w);
  if (std::isinf(xw)) return 1.0;
  return (xw - 1.0) / (xw + 1.0);
}

// Direct bid rule: scale the preset bid by the sigma of the quality ratio,
// capped at the adjustment range. Always strictly inside the bid region.
inline double str1_bid(double bid, double ratio, double w, double r_a) {
  if (!(bid > 0.0)) fail(Errc::non_positive_bid, "str1_bid");
  if (r_a < 0.0 || r_a >= 1.0)
    fail(Errc::invalid_spec, "adjust_range must be in [0,1)");
  return bid * (1.0 + sigma(ratio, w) * r_a);
}

}  // namespace ocpc
