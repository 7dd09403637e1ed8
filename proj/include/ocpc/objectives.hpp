#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "ocpc/bidopt.hpp"
#include "ocpc/domain.hpp"
#include "ocpc/errors.hpp"

namespace ocpc {

// Declarative choice of the composite ranking index f(.). F1 promotes GMV
// alone, F2 trades GMV against platform revenue, and the sigma composites
// scale eCPM by how a candidate's signal compares to the auction mean.
struct ObjectiveSpec {
  enum class Variant { f1, f2, sigma_composite };
  enum class Signal { gmv, cvr, asr };

  Variant variant = Variant::f2;
  double alpha = 1.0;            // f2 trade-off coefficient, >= 0
  Signal signal = Signal::gmv;   // sigma_composite only
  double w = 6.0;                // sigma exponent, > 0

  static ObjectiveSpec f1() { return {Variant::f1, 0.0, Signal::gmv, 1.0}; }
  static ObjectiveSpec f2(double alpha) {
    if (alpha < 0.0) fail(Errc::invalid_spec, "alpha must be >= 0");
    return {Variant::f2, alpha, Signal::gmv, 1.0};
  }
  static ObjectiveSpec sigma_composite(Signal signal, double w) {
    if (!(w > 0.0)) fail(Errc::non_positive_exponent, "objective w");
    return {Variant::sigma_composite, 0.0, signal, w};
  }

  std::string name() const {
    switch (variant) {
      case Variant::f1: return "f1";
      case Variant::f2: return "f2";
      case Variant::sigma_composite:
        switch (signal) {
          case Signal::gmv: return "sigma-gmv";
          case Signal::cvr: return "sigma-cvr";
          case Signal::asr: return "sigma-asr";
        }
    }
    return "f2";
  }
};

inline ObjectiveSpec parse_objective(const std::string& name, double alpha,
                                     double w) {
  if (name == "f1") return ObjectiveSpec::f1();
  if (name == "f2") return ObjectiveSpec::f2(alpha);
  if (name == "sigma-gmv")
    return ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::gmv, w);
  if (name == "sigma-cvr")
    return ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::cvr, w);
  if (name == "sigma-asr")
    return ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::asr, w);
  fail(Errc::invalid_spec, "unknown objective '" + name + "'");
}

// Per-auction normalizers for the sigma composites: the mean signal over the
// full eligible list, computed once before ranking and frozen while the
// greedy loop runs.
struct AuctionContext {
  std::size_t n_candidates = 0;
  double mean_gmv = 0.0;  // mean of pcvr * ppb
  double mean_cvr = 0.0;  // mean of pcvr
  std::optional<double> mean_asr;
};

inline AuctionContext make_auction_context(
    std::span<const AdCandidate> candidates, const ObjectiveSpec& spec) {
  AuctionContext ctx;
  ctx.n_candidates = candidates.size();
  if (candidates.empty()) return ctx;

  double sum_gmv = 0.0;
  double sum_cvr = 0.0;
  for (const AdCandidate& c : candidates) {
    sum_gmv += c.pcvr * c.ppb;
    sum_cvr += c.pcvr;
  }
  const auto n = static_cast<double>(candidates.size());
  ctx.mean_gmv = sum_gmv / n;
  ctx.mean_cvr = sum_cvr / n;

  if (spec.variant == ObjectiveSpec::Variant::sigma_composite &&
      spec.signal == ObjectiveSpec::Signal::asr) {
    double sum_asr = 0.0;
    for (const AdCandidate& c : candidates) {
      if (!c.pasr)
        fail(Errc::missing_asr, "campaign " + c.campaign_id + " has no pasr");
      sum_asr += *c.pasr;
    }
    ctx.mean_asr = sum_asr / n;
  }
  return ctx;
}

// Composite index of one candidate at a proposed optimized bid. Monotone
// nondecreasing in b_star for every variant, which the ranking stage relies
// on when it evaluates candidates at their upper bounds.
inline double evaluate(const ObjectiveSpec& spec, const AdCandidate& cand,
                       double b_star, const AuctionContext& ctx) {
  if (!(b_star > 0.0)) fail(Errc::non_positive_bid, "b_star must be > 0");
  switch (spec.variant) {
    case ObjectiveSpec::Variant::f1:
      return cand.pctr * cand.pcvr * cand.ppb;
    case ObjectiveSpec::Variant::f2:
      return cand.pctr * cand.pcvr * cand.ppb + spec.alpha * cand.pctr * b_star;
    case ObjectiveSpec::Variant::sigma_composite: {
      double own = 0.0;
      double mean = 0.0;
      switch (spec.signal) {
        case ObjectiveSpec::Signal::gmv:
          own = cand.pcvr * cand.ppb;
          mean = ctx.mean_gmv;
          break;
        case ObjectiveSpec::Signal::cvr:
          own = cand.pcvr;
          mean = ctx.mean_cvr;
          break;
        case ObjectiveSpec::Signal::asr:
          if (!cand.pasr)
            fail(Errc::missing_asr, "campaign " + cand.campaign_id);
          if (!ctx.mean_asr) fail(Errc::zero_normalizer, "mean pasr missing");
          own = *cand.pasr;
          mean = *ctx.mean_asr;
          break;
      }
      if (!(mean > 0.0))
        fail(Errc::zero_normalizer,
             "auction mean signal must be > 0 for sigma objectives");
      return cand.pctr * b_star *
             (1.0 + sigma(own / mean, spec.w) * cand.adjust_range);
    }
  }
  fail(Errc::invalid_spec, "unknown objective variant");
}

}  // namespace ocpc
