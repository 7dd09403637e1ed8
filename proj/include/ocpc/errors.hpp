#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ocpc {

// Every contract violation in the engine throws an Error carrying one of
// these codes. Codes are stable: the CLI maps them to exit-code classes and
// tests match on them rather than on message text.
enum class Errc {
  empty_candidates,
  non_positive_bid,
  probability_out_of_range,
  non_positive_expected_cvr,
  non_positive_threshold,
  non_positive_exponent,
  negative_input,
  empty_history,
  all_zero_after_trim,
  empty_samples,
  zero_normalizer,
  missing_asr,
  no_eligible_winner,
  unranked_outcome,
  degenerate_labels,
  no_valid_groups,
  empty_ledger,
  empty_records,
  unordered_log,
  invalid_spec,
  manifest_mismatch,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::empty_candidates: return "EmptyCandidates";
    case Errc::non_positive_bid: return "NonPositiveBid";
    case Errc::probability_out_of_range: return "ProbabilityOutOfRange";
    case Errc::non_positive_expected_cvr: return "NonPositiveExpectedCvr";
    case Errc::non_positive_threshold: return "NonPositiveThreshold";
    case Errc::non_positive_exponent: return "NonPositiveExponent";
    case Errc::negative_input: return "NegativeInput";
    case Errc::empty_history: return "EmptyHistory";
    case Errc::all_zero_after_trim: return "AllZeroAfterTrim";
    case Errc::empty_samples: return "EmptySamples";
    case Errc::zero_normalizer: return "ZeroNormalizer";
    case Errc::missing_asr: return "MissingAsr";
    case Errc::no_eligible_winner: return "NoEligibleWinner";
    case Errc::unranked_outcome: return "UnrankedOutcome";
    case Errc::degenerate_labels: return "DegenerateLabels";
    case Errc::no_valid_groups: return "NoValidGroups";
    case Errc::empty_ledger: return "EmptyLedger";
    case Errc::empty_records: return "EmptyRecords";
    case Errc::unordered_log: return "UnorderedLog";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::manifest_mismatch: return "ManifestMismatch";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ocpc
