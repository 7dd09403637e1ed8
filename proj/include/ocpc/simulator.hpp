#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ocpc/auction.hpp"
#include "ocpc/calibration.hpp"
#include "ocpc/domain.hpp"
#include "ocpc/errors.hpp"
#include "ocpc/log.hpp"
#include "ocpc/metrics.hpp"

namespace ocpc {

// One winning impression in a replay.
struct LedgerRow {
  std::string pv_id;
  int slot = 0;
  std::string campaign_id;
  std::string category_id;
  double pctr = 0.0;
  double pcvr = 0.0;  // calibrated
  double ppb = 0.0;
  std::optional<double> pasr;
  double b_star = 0.0;
  double price_per_click = 0.0;
  double bid = 0.0;
  double r_a = 0.0;
};

struct CampaignState {
  std::optional<double> budget_remaining;  // nullopt = unlimited

  bool exhausted() const {
    return budget_remaining.has_value() && *budget_remaining <= 0.0;
  }
};

struct ReplayStats {
  std::int64_t pvs = 0;       // records consumed
  std::int64_t skipped = 0;   // records dropped by per-PV errors or exclusion
  std::int64_t rows = 0;      // winner impressions emitted
};

struct Ledger {
  std::vector<LedgerRow> rows;
  ReplayStats stats;
};

using RowSink = std::function<void(const LedgerRow&)>;

// Replays a timestamp-ordered bid log under one strategy configuration.
// Budget-exhausted campaigns are dropped from later auctions; the impression
// that crosses the budget line is kept and the budget floors at zero.
// Spend is expected spend: pctr * price per winning impression. Per-PV
// auction errors are logged and skipped so long replays survive bad records.
inline ReplayStats replay_stream(const RecordSource& source,
                                 const StrategyConfig& config,
                                 std::span<const Campaign> campaigns,
                                 const RowSink& sink) {
  std::unordered_map<std::string, CampaignState> states;
  states.reserve(campaigns.size());
  for (const Campaign& c : campaigns)
    states[c.campaign_id] = CampaignState{c.budget};

  ReplayStats stats;
  std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
  PvRequest filtered;

  while (std::optional<BidLogRecord> record = source()) {
    ++stats.pvs;
    if (record->timestamp < last_ts)
      fail(Errc::unordered_log,
           "pv " + record->pv_id + " is older than its predecessor");
    last_ts = record->timestamp;

    try {
      const PvRequest* request = &*record;
      if (config.enforce_budget) {
        filtered.pv_id = record->pv_id;
        filtered.timestamp = record->timestamp;
        filtered.user_id = record->user_id;
        filtered.position_id = record->position_id;
        filtered.n_slots = record->n_slots;
        filtered.candidates.clear();
        for (AdCandidate& c : record->candidates) {
          const auto it = states.find(c.campaign_id);
          if (it != states.end() && it->second.exhausted()) continue;
          filtered.candidates.push_back(std::move(c));
        }
        if (filtered.candidates.empty()) {
          ++stats.skipped;
          continue;  // every eligible campaign is out of budget
        }
        request = &filtered;
      }

      const AuctionOutcome outcome = run_ocpc(*request, config);

      for (std::size_t j = 0; j < outcome.winners.size(); ++j) {
        const OutcomeEntry& winner = outcome.winners[j];
        const AdCandidate& c = request->candidates[winner.candidate_index];
        LedgerRow row;
        row.pv_id = request->pv_id;
        row.slot = static_cast<int>(j);
        row.campaign_id = c.campaign_id;
        row.category_id = c.category_id;
        row.pctr = c.pctr;
        row.pcvr = calibrate_cvr(c.pcvr, config.calibration_threshold);
        row.ppb = c.ppb;
        row.pasr = c.pasr;
        row.b_star = winner.b_star;
        row.price_per_click = winner.price_per_click;
        row.bid = c.bid;
        row.r_a = config.ra_override.value_or(c.adjust_range);
        sink(row);
        ++stats.rows;

        if (config.enforce_budget) {
          auto& state = states[c.campaign_id];  // unknown ids are unlimited
          if (state.budget_remaining) {
            *state.budget_remaining -= c.pctr * winner.price_per_click;
            if (*state.budget_remaining < 0.0) state.budget_remaining = 0.0;
          }
        }
      }
    } catch (const Error& e) {
      ++stats.skipped;
      log_warn("pv " + record->pv_id + " skipped: " + e.what());
    }
  }
  return stats;
}

inline Ledger replay(const RecordSource& source, const StrategyConfig& config,
                     std::span<const Campaign> campaigns) {
  Ledger ledger;
  ledger.stats = replay_stream(
      source, config, campaigns,
      [&ledger](const LedgerRow& row) { ledger.rows.push_back(row); });
  return ledger;
}

inline Ledger replay(std::span<const BidLogRecord> log,
                     const StrategyConfig& config,
                     std::span<const Campaign> campaigns) {
  std::size_t next = 0;
  return replay(
      [&log, &next]() -> std::optional<BidLogRecord> {
        if (next >= log.size()) return std::nullopt;
        return log[next++];
      },
      config, campaigns);
}

// ---------------------------------------------------------------------------
// Breakdown reports over a (base, test) ledger pair
// ---------------------------------------------------------------------------

inline MetricsTotals totals_of(std::span<const LedgerRow> rows) {
  MetricsTotals totals;
  for (const LedgerRow& row : rows)
    totals.add_impression(row.pctr, row.pcvr, row.ppb, row.pasr,
                          row.price_per_click);
  return totals;
}

inline MetricsReport report_of(const Ledger& ledger) {
  if (ledger.rows.empty()) fail(Errc::empty_ledger, "report_of");
  return finalize(totals_of(ledger.rows));
}

struct CampaignComparison {
  std::string campaign_id;
  MetricsReport base;
  MetricsReport test;
  CompareReport deltas;
  Outcome outcome = Outcome::other;
};

struct CampaignBreakdown {
  double min_conversions = 5.0;
  std::vector<CampaignComparison> rows;  // included campaigns, base cost desc
  std::size_t improved = 0;
  std::size_t exchanged = 0;
  std::size_t other = 0;

  std::size_t included() const { return rows.size(); }
  double improved_share() const {
    return rows.empty() ? 0.0
                        : static_cast<double>(improved) /
                              static_cast<double>(rows.size());
  }
  double exchanged_share() const {
    return rows.empty() ? 0.0
                        : static_cast<double>(exchanged) /
                              static_cast<double>(rows.size());
  }
};

namespace detail {

inline std::map<std::string, MetricsTotals> totals_by(
    std::span<const LedgerRow> rows, bool by_category) {
  std::map<std::string, MetricsTotals> result;
  for (const LedgerRow& row : rows)
    result[by_category ? row.category_id : row.campaign_id].add_impression(
        row.pctr, row.pcvr, row.ppb, row.pasr, row.price_per_click);
  return result;
}

}  // namespace detail

// Per-campaign deltas of the test run against the base run over the same
// log. Campaigns below the expected-conversion threshold on both sides are
// excluded from the rows and the outcome proportions.
inline CampaignBreakdown per_campaign_report(const Ledger& test,
                                             const Ledger& base,
                                             double min_conversions = 5.0) {
  const auto base_totals = detail::totals_by(base.rows, false);
  const auto test_totals = detail::totals_by(test.rows, false);

  CampaignBreakdown breakdown;
  breakdown.min_conversions = min_conversions;

  std::map<std::string, std::pair<MetricsTotals, MetricsTotals>> merged;
  for (const auto& [id, totals] : base_totals) merged[id].first = totals;
  for (const auto& [id, totals] : test_totals) merged[id].second = totals;

  for (const auto& [id, pair] : merged) {
    const auto& [base_t, test_t] = pair;
    if (base_t.conversions < min_conversions &&
        test_t.conversions < min_conversions)
      continue;
    CampaignComparison row;
    row.campaign_id = id;
    row.base = finalize(base_t);
    row.test = finalize(test_t);
    row.deltas = compare(row.base, row.test);
    row.outcome = classify_outcome(row.base, row.test);
    switch (row.outcome) {
      case Outcome::improved: ++breakdown.improved; break;
      case Outcome::quantity_quality_exchange: ++breakdown.exchanged; break;
      case Outcome::other: ++breakdown.other; break;
    }
    breakdown.rows.push_back(std::move(row));
  }

  std::sort(breakdown.rows.begin(), breakdown.rows.end(),
            [](const CampaignComparison& a, const CampaignComparison& b) {
              if (a.base.cost != b.base.cost) return a.base.cost > b.base.cost;
              return a.campaign_id < b.campaign_id;
            });
  return breakdown;
}

// Category classes partition in presentation order: both GPM and ROI up;
// else GPM up; else quantity/quality exchange; else other.
enum class CategoryClass { improved, gpm_improved, exchanged, other };

inline const char* category_class_name(CategoryClass c) {
  switch (c) {
    case CategoryClass::improved: return "GpmAndRoiImproved";
    case CategoryClass::gpm_improved: return "GpmImproved";
    case CategoryClass::exchanged: return "QuantityQualityExchange";
    case CategoryClass::other: return "Other";
  }
  return "Other";
}

struct CategoryShift {
  std::string category_id;
  double base_pv = 0.0;
  double test_pv = 0.0;
  double base_share = 0.0;  // of base ledger impressions
  double test_share = 0.0;
  std::optional<double> share_variation;  // relative; nullopt if base empty
  CategoryClass cls = CategoryClass::other;
  MetricsReport base;
  MetricsReport test;
};

struct CategoryBreakdown {
  std::vector<CategoryShift> rows;  // base cost desc
  // Class proportions weighted by category count and by test-run PV.
  double category_share[4] = {0, 0, 0, 0};
  double pv_share[4] = {0, 0, 0, 0};
};

inline CategoryBreakdown per_category_report(const Ledger& test,
                                             const Ledger& base) {
  const auto base_totals = detail::totals_by(base.rows, true);
  const auto test_totals = detail::totals_by(test.rows, true);

  const double base_pv_total =
      static_cast<double>(std::max<std::size_t>(base.rows.size(), 1));
  const double test_pv_total =
      static_cast<double>(std::max<std::size_t>(test.rows.size(), 1));

  std::map<std::string, std::pair<MetricsTotals, MetricsTotals>> merged;
  for (const auto& [id, totals] : base_totals) merged[id].first = totals;
  for (const auto& [id, totals] : test_totals) merged[id].second = totals;

  CategoryBreakdown breakdown;
  for (const auto& [id, pair] : merged) {
    const auto& [base_t, test_t] = pair;
    CategoryShift shift;
    shift.category_id = id;
    shift.base_pv = base_t.impressions;
    shift.test_pv = test_t.impressions;
    shift.base_share = base_t.impressions / base_pv_total;
    shift.test_share = test_t.impressions / test_pv_total;
    if (shift.base_share > 0.0)
      shift.share_variation =
          (shift.test_share - shift.base_share) / shift.base_share;
    shift.base = finalize(base_t);
    shift.test = finalize(test_t);

    const CompareReport d = compare(shift.base, shift.test);
    const Outcome outcome = classify_outcome(shift.base, shift.test);
    if (outcome == Outcome::improved)
      shift.cls = CategoryClass::improved;
    else if (d.gpm && *d.gpm > 0.0)
      shift.cls = CategoryClass::gpm_improved;
    else if (outcome == Outcome::quantity_quality_exchange)
      shift.cls = CategoryClass::exchanged;
    else
      shift.cls = CategoryClass::other;
    breakdown.rows.push_back(std::move(shift));
  }

  const double n_categories =
      static_cast<double>(std::max<std::size_t>(breakdown.rows.size(), 1));
  for (const CategoryShift& shift : breakdown.rows) {
    const auto k = static_cast<std::size_t>(shift.cls);
    breakdown.category_share[k] += 1.0 / n_categories;
    breakdown.pv_share[k] += shift.test_pv / test_pv_total;
  }

  std::sort(breakdown.rows.begin(), breakdown.rows.end(),
            [](const CategoryShift& a, const CategoryShift& b) {
              if (a.base.cost != b.base.cost) return a.base.cost > b.base.cost;
              return a.category_id < b.category_id;
            });
  return breakdown;
}

}  // namespace ocpc
