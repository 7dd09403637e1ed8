#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ocpc/errors.hpp"

namespace ocpc {

// One eligible ad inside one PV auction. All predictions are attached to the
// candidate; the engine never sees feature vectors or model internals.
struct AdCandidate {
  std::string campaign_id;
  std::string category_id;
  double bid = 0.0;           // preset CPC bid, > 0
  double pctr = 0.0;          // predicted click-through rate, [0,1]
  double pcvr = 0.0;          // predicted conversion rate, [0,1]
  double ppb = 0.0;           // predicted pay-per-buy (revenue per conversion), >= 0
  double expected_cvr = 0.0;  // campaign-level conversion expectation, > 0
  double adjust_range = 0.0;  // max relative bid adjustment r_a, [0,1)
  std::optional<double> pasr; // predicted add-to-cart rate, [0,1]
  bool opt_authorized = true; // advertiser opted into bid optimization
};

// One page-view request: an auction over a candidate list for n_slots spots.
struct PvRequest {
  std::string pv_id;
  std::int64_t timestamp = 0;  // milliseconds since epoch
  std::string user_id;
  std::string position_id;
  int n_slots = 1;
  std::vector<AdCandidate> candidates;
};

// A bid-log record is a replayed PV request whose candidates carry the raw
// (pre-calibration) pcvr in the pcvr field.
using BidLogRecord = PvRequest;

// Pull-based record stream; returns nullopt at end of stream.
using RecordSource = std::function<std::optional<BidLogRecord>()>;

struct Campaign {
  std::string campaign_id;
  std::optional<double> budget;  // nullopt = unlimited
  std::string category_id;
};

enum class Strategy { str0 = 0, str1 = 1, str2 = 2, str3 = 3 };

namespace detail {

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

inline std::string candidate_label(const PvRequest& request, std::size_t i) {
  return "candidate " + std::to_string(i) + " (campaign " +
         request.candidates[i].campaign_id + ") in pv " + request.pv_id;
}

}  // namespace detail

// Checks every type invariant and returns the request untouched. Candidates
// with pctr = 0 are legal (replayed logs contain them) but can never win;
// zero_pctr_candidates() reports their indices for callers that care.
inline const PvRequest& validate(const PvRequest& request) {
  if (request.n_slots < 1)
    fail(Errc::invalid_spec, "n_slots must be >= 1 in pv " + request.pv_id);
  if (request.candidates.empty())
    fail(Errc::empty_candidates, "pv " + request.pv_id + " has no candidates");
  for (std::size_t i = 0; i < request.candidates.size(); ++i) {
    const AdCandidate& c = request.candidates[i];
    if (!(c.bid > 0.0))
      fail(Errc::non_positive_bid, detail::candidate_label(request, i));
    if (!detail::is_probability(c.pctr))
      fail(Errc::probability_out_of_range,
           "pctr of " + detail::candidate_label(request, i));
    if (!detail::is_probability(c.pcvr))
      fail(Errc::probability_out_of_range,
           "pcvr of " + detail::candidate_label(request, i));
    if (c.pasr && !detail::is_probability(*c.pasr))
      fail(Errc::probability_out_of_range,
           "pasr of " + detail::candidate_label(request, i));
    if (!(c.expected_cvr > 0.0))
      fail(Errc::non_positive_expected_cvr, detail::candidate_label(request, i));
    if (c.ppb < 0.0)
      fail(Errc::invalid_spec,
           "ppb must be >= 0 for " + detail::candidate_label(request, i));
    if (c.adjust_range < 0.0 || c.adjust_range >= 1.0)
      fail(Errc::invalid_spec,
           "adjust_range must be in [0,1) for " +
               detail::candidate_label(request, i));
  }
  return request;
}

inline std::vector<std::size_t> zero_pctr_candidates(const PvRequest& request) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < request.candidates.size(); ++i)
    if (request.candidates[i].pctr == 0.0) indices.push_back(i);
  return indices;
}

}  // namespace ocpc
