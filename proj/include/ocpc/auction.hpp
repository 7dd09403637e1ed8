#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ocpc/bidopt.hpp"
#include "ocpc/calibration.hpp"
#include "ocpc/domain.hpp"
#include "ocpc/errors.hpp"
#include "ocpc/objectives.hpp"

namespace ocpc {

// Full strategy-layer configuration for one run.
struct StrategyConfig {
  Strategy strategy = Strategy::str2;
  ObjectiveSpec objective = ObjectiveSpec::sigma_composite(
      ObjectiveSpec::Signal::gmv, 6.0);   // ranking index, str2 only
  double w = 2.0;                         // sigma exponent for the str1 bid rule
  double calibration_threshold = 0.012;   // tc; 1.0 disables calibration
  double reserve_score = 0.0;             // eCPM floor for winning and pricing
  bool enforce_budget = true;
  std::optional<double> ra_override;      // replaces per-candidate adjust_range
  std::optional<int> slots_override;      // replaces per-PV n_slots
};

struct OutcomeEntry {
  std::size_t candidate_index = 0;  // into the auctioned candidate list
  std::string campaign_id;
  double b_star = 0.0;
  double final_score = 0.0;         // rank score at b_star
  double price_per_click = 0.0;     // set by gsp_price, winners only
};

struct AuctionOutcome {
  std::vector<OutcomeEntry> winners;  // display order, scores nonincreasing
  std::vector<OutcomeEntry> losers;   // score descending
  int slots_filled = 0;
  bool priced = false;
};

// Test hook: per-iteration snapshots of the remaining candidates' upper
// rank scores, for checking that bound tightening never raises them.
struct RankTrace {
  std::vector<std::vector<std::pair<std::size_t, double>>> upper_scores;
};

namespace detail {

inline void sort_losers(std::vector<OutcomeEntry>& losers) {
  std::sort(losers.begin(), losers.end(),
            [](const OutcomeEntry& a, const OutcomeEntry& b) {
              if (a.final_score != b.final_score)
                return a.final_score > b.final_score;
              return a.campaign_id < b.campaign_id;
            });
}

}  // namespace detail

// Greedy ranking under eCPM sorting (unpriced). Each round sorts the
// remaining ads by the objective at their bid upper bound, picks the first
// whose upper rank score clears the largest lower rank score (and the
// reserve), then caps everyone else's upper bound at the winner's score so
// the pick stays on top. Final bids are recovered from the upper scores.
// O(n_slots * n * log n).
inline AuctionOutcome rank(std::span<const AdCandidate> candidates,
                           std::span<const BidBounds> bounds,
                           const ObjectiveSpec& spec, int n_slots,
                           double reserve_score = 0.0,
                           RankTrace* trace = nullptr) {
  if (candidates.size() != bounds.size())
    fail(Errc::invalid_spec, "candidates and bounds differ in length");
  if (candidates.empty()) fail(Errc::empty_candidates, "rank");
  if (n_slots < 1) fail(Errc::invalid_spec, "n_slots must be >= 1");

  const std::size_t n = candidates.size();
  bool any_eligible = false;
  for (const AdCandidate& c : candidates) any_eligible |= c.pctr > 0.0;
  if (!any_eligible)
    fail(Errc::no_eligible_winner, "every candidate has pctr = 0");

  const AuctionContext ctx = make_auction_context(candidates, spec);

  std::vector<double> upper_score(n);
  std::vector<double> upper_bid(n);
  for (std::size_t i = 0; i < n; ++i) {
    upper_score[i] = bounds[i].upper_score;
    upper_bid[i] = bounds[i].upper_bid;
  }

  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  AuctionOutcome outcome;
  std::vector<double> objective_value(n);

  while (static_cast<int>(outcome.winners.size()) < n_slots &&
         !remaining.empty()) {
    for (std::size_t i : remaining)
      objective_value[i] = evaluate(spec, candidates[i], upper_bid[i], ctx);

    std::sort(remaining.begin(), remaining.end(),
              [&](std::size_t a, std::size_t b) {
                if (objective_value[a] != objective_value[b])
                  return objective_value[a] > objective_value[b];
                return candidates[a].campaign_id < candidates[b].campaign_id;
              });

    double threshold = reserve_score;
    for (std::size_t i : remaining)
      threshold = std::max(threshold, bounds[i].lower_score);

    std::size_t pick = n;  // sentinel
    for (std::size_t i : remaining) {
      if (candidates[i].pctr <= 0.0) continue;
      if (upper_score[i] >= threshold) {
        pick = i;
        break;
      }
    }
    if (pick == n) break;  // nobody clears the reserve

    OutcomeEntry winner;
    winner.candidate_index = pick;
    winner.campaign_id = candidates[pick].campaign_id;
    winner.final_score = upper_score[pick];
    winner.b_star = upper_score[pick] / candidates[pick].pctr;
    outcome.winners.push_back(std::move(winner));

    std::erase(remaining, pick);
    for (std::size_t i : remaining) {
      upper_score[i] = std::min(upper_score[i], upper_score[pick]);
      if (candidates[i].pctr > 0.0)
        upper_bid[i] = std::min(upper_bid[i],
                                upper_score[i] / candidates[i].pctr);
    }
    if (trace != nullptr) {
      std::vector<std::pair<std::size_t, double>> snapshot;
      snapshot.reserve(remaining.size());
      for (std::size_t i : remaining) snapshot.emplace_back(i, upper_score[i]);
      trace->upper_scores.push_back(std::move(snapshot));
    }
  }

  for (std::size_t i : remaining) {
    OutcomeEntry loser;
    loser.candidate_index = i;
    loser.campaign_id = candidates[i].campaign_id;
    loser.final_score = upper_score[i];
    loser.b_star = candidates[i].pctr > 0.0
                       ? upper_score[i] / candidates[i].pctr
                       : upper_bid[i];
    outcome.losers.push_back(std::move(loser));
  }
  detail::sort_losers(outcome.losers);
  outcome.slots_filled = static_cast<int>(outcome.winners.size());
  return outcome;
}

// Sort by pctr * pcvr * bid, no bid optimization. Promotes GMV by changing
// the sort key instead of the bids.
inline AuctionOutcome str3_rank(std::span<const AdCandidate> candidates,
                                int n_slots, double reserve_score = 0.0) {
  if (candidates.empty()) fail(Errc::empty_candidates, "str3_rank");
  if (n_slots < 1) fail(Errc::invalid_spec, "n_slots must be >= 1");

  const std::size_t n = candidates.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i)
    score[i] = candidates[i].pctr * candidates[i].pcvr * candidates[i].bid;

  bool any_eligible = false;
  for (std::size_t i = 0; i < n; ++i) any_eligible |= score[i] > 0.0;
  if (!any_eligible)
    fail(Errc::no_eligible_winner, "every candidate has zero rank score");

  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return candidates[a].campaign_id < candidates[b].campaign_id;
  });

  AuctionOutcome outcome;
  for (std::size_t i : order) {
    OutcomeEntry entry;
    entry.candidate_index = i;
    entry.campaign_id = candidates[i].campaign_id;
    entry.b_star = candidates[i].bid;
    entry.final_score = score[i];
    const bool wins = static_cast<int>(outcome.winners.size()) < n_slots &&
                      score[i] > 0.0 && score[i] >= reserve_score;
    (wins ? outcome.winners : outcome.losers).push_back(std::move(entry));
  }
  detail::sort_losers(outcome.losers);
  outcome.slots_filled = static_cast<int>(outcome.winners.size());
  return outcome;
}

namespace detail {

// Plain sort for the strategies that keep one score per candidate fixed.
inline AuctionOutcome sorted_outcome(std::span<const AdCandidate> candidates,
                                     std::span<const double> b_star,
                                     std::span<const double> score, int n_slots,
                                     double reserve_score) {
  const std::size_t n = candidates.size();
  bool any_eligible = false;
  for (std::size_t i = 0; i < n; ++i) any_eligible |= score[i] > 0.0;
  if (!any_eligible)
    fail(Errc::no_eligible_winner, "every candidate has zero rank score");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return candidates[a].campaign_id < candidates[b].campaign_id;
  });

  AuctionOutcome outcome;
  for (std::size_t i : order) {
    OutcomeEntry entry;
    entry.candidate_index = i;
    entry.campaign_id = candidates[i].campaign_id;
    entry.b_star = b_star[i];
    entry.final_score = score[i];
    const bool wins = static_cast<int>(outcome.winners.size()) < n_slots &&
                      score[i] > 0.0 && score[i] >= reserve_score;
    (wins ? outcome.winners : outcome.losers).push_back(std::move(entry));
  }
  sort_losers(outcome.losers);
  outcome.slots_filled = static_cast<int>(outcome.winners.size());
  return outcome;
}

}  // namespace detail

// Second-price pricing over the final ranking: the winner in slot j pays the
// next entry's rank score (the next winner, else the best loser, else the
// reserve), floored at the reserve and divided back into bid units by the
// winner's own score-per-bid factor. With eCPM scoring that factor is
// exactly pctr; under str3's pcvr-weighted key it generalizes the same way.
inline void gsp_price(AuctionOutcome& outcome, double reserve_score = 0.0) {
  if (reserve_score < 0.0)
    fail(Errc::invalid_spec, "reserve_score must be >= 0");
  for (std::size_t j = 0; j + 1 < outcome.winners.size(); ++j)
    if (outcome.winners[j].final_score < outcome.winners[j + 1].final_score)
      fail(Errc::unranked_outcome, "winner scores must be nonincreasing");
  for (const OutcomeEntry& loser : outcome.losers)
    if (!outcome.winners.empty() &&
        loser.final_score > outcome.winners.back().final_score)
      fail(Errc::unranked_outcome, "loser outranks a winner");

  const double best_loser_score =
      outcome.losers.empty() ? reserve_score
                             : std::max(outcome.losers.front().final_score,
                                        reserve_score);
  for (std::size_t j = 0; j < outcome.winners.size(); ++j) {
    OutcomeEntry& winner = outcome.winners[j];
    if (!(winner.final_score > 0.0) || !(winner.b_star > 0.0))
      fail(Errc::unranked_outcome, "winner has no positive rank score");
    const double next_score = j + 1 < outcome.winners.size()
                                  ? std::max(outcome.winners[j + 1].final_score,
                                             reserve_score)
                                  : best_loser_score;
    const double quality = winner.final_score / winner.b_star;
    winner.price_per_click = next_score / quality;
  }
  outcome.priced = true;
}

// Whole strategy layer for one PV: calibrate, compute boundaries, rank,
// price. Str0 keeps bids and sorts by eCPM; str1 applies the direct sigma
// rule; str2 runs the boundary + greedy ranking pipeline; str3 reranks by
// conversion-weighted eCPM.
inline AuctionOutcome run_ocpc(const PvRequest& request,
                               const StrategyConfig& config) {
  validate(request);
  const int n_slots = config.slots_override.value_or(request.n_slots);
  if (n_slots < 1) fail(Errc::invalid_spec, "n_slots must be >= 1");

  std::vector<AdCandidate> cands(request.candidates.begin(),
                                 request.candidates.end());
  for (AdCandidate& c : cands) {
    c.pcvr = calibrate_cvr(c.pcvr, config.calibration_threshold);
    if (config.ra_override) c.adjust_range = *config.ra_override;
  }

  AuctionOutcome outcome;
  switch (config.strategy) {
    case Strategy::str0: {
      std::vector<double> b_star(cands.size());
      std::vector<double> score(cands.size());
      for (std::size_t i = 0; i < cands.size(); ++i) {
        b_star[i] = cands[i].bid;
        score[i] = cands[i].pctr * cands[i].bid;
      }
      outcome = detail::sorted_outcome(cands, b_star, score, n_slots,
                                       config.reserve_score);
      break;
    }
    case Strategy::str1: {
      std::vector<double> b_star(cands.size());
      std::vector<double> score(cands.size());
      for (std::size_t i = 0; i < cands.size(); ++i) {
        const AdCandidate& c = cands[i];
        const double ratio = quality_ratio(c.pcvr, c.expected_cvr);
        b_star[i] = c.opt_authorized
                        ? str1_bid(c.bid, ratio, config.w, c.adjust_range)
                        : c.bid;
        score[i] = c.pctr * b_star[i];
      }
      outcome = detail::sorted_outcome(cands, b_star, score, n_slots,
                                       config.reserve_score);
      break;
    }
    case Strategy::str2: {
      std::vector<BidBounds> bounds(cands.size());
      for (std::size_t i = 0; i < cands.size(); ++i) {
        const AdCandidate& c = cands[i];
        const double ratio = quality_ratio(c.pcvr, c.expected_cvr);
        bounds[i] =
            bid_bounds(c.bid, c.pctr, ratio, c.adjust_range, c.opt_authorized);
      }
      outcome =
          rank(cands, bounds, config.objective, n_slots, config.reserve_score);
      break;
    }
    case Strategy::str3:
      outcome = str3_rank(cands, n_slots, config.reserve_score);
      break;
  }

  gsp_price(outcome, config.reserve_score);
  return outcome;
}

}  // namespace ocpc
