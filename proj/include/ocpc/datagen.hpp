#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocpc/calibration.hpp"
#include "ocpc/domain.hpp"
#include "ocpc/errors.hpp"
#include "ocpc/logio.hpp"

namespace ocpc {

struct LogNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
};

struct BetaParams {
  double a = 2.0;
  double b = 50.0;

  double mean() const { return a / (a + b); }
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

// Declarative synthetic-log spec. The default-constructed value is the
// pinned desk-scale benchmark; everything is derived from the seed so a
// given spec always produces a byte-identical log.
struct GenSpec {
  std::uint64_t seed = 42;
  std::int64_t n_pv = 100000;
  IntRange candidates_per_pv{200, 200};
  int n_campaigns = 500;
  int n_categories = 20;
  int n_slots = 3;
  int n_users = 20000;
  int n_positions = 4;

  LogNormalParams bid{0.0, 0.5};
  BetaParams pctr{3.0, 80.0};
  BetaParams pcvr{2.0, 120.0};
  LogNormalParams ppb{4.0, 0.8};
  std::optional<BetaParams> pasr = BetaParams{2.0, 30.0};
  double category_spread = 1.6;       // multiplicative jitter across categories
  std::vector<double> ra_choices{0.4};
  double budgeted_fraction = 0.2;
  LogNormalParams budget{6.5, 1.0};
  double gmv_value_correlation = 0.0; // corr knob between log-bid and log-ppb
  double opt_out_fraction = 0.02;
  int history_len = 200;              // pCVR window per campaign
  double trim_fraction = 0.10;
  std::int64_t start_timestamp = 1700000000000;

  static GenSpec desk_scale() { return GenSpec{}; }

  void validate() const {
    if (n_pv < 0) fail(Errc::invalid_spec, "n_pv must be >= 0");
    if (candidates_per_pv.lo < 1 || candidates_per_pv.hi < candidates_per_pv.lo)
      fail(Errc::invalid_spec, "candidates_per_pv range is invalid");
    if (n_campaigns < candidates_per_pv.hi)
      fail(Errc::invalid_spec, "need at least candidates_per_pv campaigns");
    if (n_categories < 1 || n_users < 1 || n_positions < 1 || n_slots < 1)
      fail(Errc::invalid_spec, "counts must be positive");
    if (gmv_value_correlation < -1.0 || gmv_value_correlation > 1.0)
      fail(Errc::invalid_spec, "gmv_value_correlation must be in [-1,1]");
    if (ra_choices.empty()) fail(Errc::invalid_spec, "ra_choices is empty");
    for (double ra : ra_choices)
      if (ra < 0.0 || ra >= 1.0)
        fail(Errc::invalid_spec, "ra choices must be in [0,1)");
    if (budgeted_fraction < 0.0 || budgeted_fraction > 1.0)
      fail(Errc::invalid_spec, "budgeted_fraction must be in [0,1]");
    if (opt_out_fraction < 0.0 || opt_out_fraction > 1.0)
      fail(Errc::invalid_spec, "opt_out_fraction must be in [0,1]");
    if (trim_fraction < 0.0 || trim_fraction >= 0.5)
      fail(Errc::invalid_spec, "trim_fraction must be in [0,0.5)");
    if (history_len < 1) fail(Errc::invalid_spec, "history_len must be >= 1");
    if (!(pctr.a > 0.0) || !(pctr.b > 0.0) || !(pcvr.a > 0.0) ||
        !(pcvr.b > 0.0) || (pasr && (!(pasr->a > 0.0) || !(pasr->b > 0.0))))
      fail(Errc::invalid_spec, "beta parameters must be positive");
    if (category_spread < 1.0)
      fail(Errc::invalid_spec, "category_spread must be >= 1");
  }
};

inline void to_json(json& j, const GenSpec& spec) {
  j = json{{"seed", spec.seed},
           {"n_pv", spec.n_pv},
           {"candidates_per_pv", {spec.candidates_per_pv.lo, spec.candidates_per_pv.hi}},
           {"n_campaigns", spec.n_campaigns},
           {"n_categories", spec.n_categories},
           {"n_slots", spec.n_slots},
           {"n_users", spec.n_users},
           {"n_positions", spec.n_positions},
           {"bid", {spec.bid.mu, spec.bid.sigma}},
           {"pctr", {spec.pctr.a, spec.pctr.b}},
           {"pcvr", {spec.pcvr.a, spec.pcvr.b}},
           {"ppb", {spec.ppb.mu, spec.ppb.sigma}},
           {"category_spread", spec.category_spread},
           {"ra_choices", spec.ra_choices},
           {"budgeted_fraction", spec.budgeted_fraction},
           {"budget", {spec.budget.mu, spec.budget.sigma}},
           {"gmv_value_correlation", spec.gmv_value_correlation},
           {"opt_out_fraction", spec.opt_out_fraction},
           {"history_len", spec.history_len},
           {"trim_fraction", spec.trim_fraction},
           {"start_timestamp", spec.start_timestamp}};
  if (spec.pasr) j["pasr"] = {spec.pasr->a, spec.pasr->b};
}

inline void from_json(const json& j, GenSpec& spec) {
  spec = GenSpec{};
  spec.seed = j.value("seed", spec.seed);
  spec.n_pv = j.value("n_pv", spec.n_pv);
  if (auto it = j.find("candidates_per_pv"); it != j.end()) {
    spec.candidates_per_pv.lo = it->at(0).get<int>();
    spec.candidates_per_pv.hi = it->at(1).get<int>();
  }
  spec.n_campaigns = j.value("n_campaigns", spec.n_campaigns);
  spec.n_categories = j.value("n_categories", spec.n_categories);
  spec.n_slots = j.value("n_slots", spec.n_slots);
  spec.n_users = j.value("n_users", spec.n_users);
  spec.n_positions = j.value("n_positions", spec.n_positions);
  if (auto it = j.find("bid"); it != j.end())
    spec.bid = {it->at(0).get<double>(), it->at(1).get<double>()};
  if (auto it = j.find("pctr"); it != j.end())
    spec.pctr = {it->at(0).get<double>(), it->at(1).get<double>()};
  if (auto it = j.find("pcvr"); it != j.end())
    spec.pcvr = {it->at(0).get<double>(), it->at(1).get<double>()};
  if (auto it = j.find("ppb"); it != j.end())
    spec.ppb = {it->at(0).get<double>(), it->at(1).get<double>()};
  if (auto it = j.find("pasr"); it != j.end()) {
    if (it->is_null())
      spec.pasr = std::nullopt;
    else
      spec.pasr = BetaParams{it->at(0).get<double>(), it->at(1).get<double>()};
  }
  spec.category_spread = j.value("category_spread", spec.category_spread);
  if (auto it = j.find("ra_choices"); it != j.end())
    spec.ra_choices = it->get<std::vector<double>>();
  spec.budgeted_fraction = j.value("budgeted_fraction", spec.budgeted_fraction);
  if (auto it = j.find("budget"); it != j.end())
    spec.budget = {it->at(0).get<double>(), it->at(1).get<double>()};
  spec.gmv_value_correlation =
      j.value("gmv_value_correlation", spec.gmv_value_correlation);
  spec.opt_out_fraction = j.value("opt_out_fraction", spec.opt_out_fraction);
  spec.history_len = j.value("history_len", spec.history_len);
  spec.trim_fraction = j.value("trim_fraction", spec.trim_fraction);
  spec.start_timestamp = j.value("start_timestamp", spec.start_timestamp);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent deterministic stream per (seed, tag, index); generation may
// shard by PV index without changing the output.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t tag,
                                  std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ (tag * 0xA24BAED4963EE407ULL)) + index));
}

inline double beta_draw(std::mt19937_64& rng, const BetaParams& p) {
  std::gamma_distribution<double> ga(p.a, 1.0);
  std::gamma_distribution<double> gb(p.b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double sum = x + y;
  return sum > 0.0 ? x / sum : 0.0;
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline std::string padded(const char* prefix, std::int64_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width,
                static_cast<long long>(value));
  return buf;
}

}  // namespace detail

struct CategoryParams {
  BetaParams pctr;
  BetaParams pcvr;
  std::optional<BetaParams> pasr;
  double ppb_shift = 0.0;
};

struct CampaignProfile {
  std::string campaign_id;
  std::string category_id;
  int category = 0;
  double bid = 0.0;
  double ppb = 0.0;
  double adjust_range = 0.0;
  double expected_cvr = 0.0;
  std::optional<double> budget;
  bool opt_authorized = true;
};

// Random-access generator: record(i) depends only on (spec, i), so replay
// can stream records without materializing the log file.
class Generator {
 public:
  explicit Generator(GenSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    build_categories();
    build_campaigns();
  }

  const GenSpec& spec() const { return spec_; }
  const std::vector<CategoryParams>& categories() const { return categories_; }
  const std::vector<CampaignProfile>& campaigns() const { return campaigns_; }

  std::vector<Campaign> campaign_set() const {
    std::vector<Campaign> result;
    result.reserve(campaigns_.size());
    for (const CampaignProfile& p : campaigns_)
      result.push_back({p.campaign_id, p.budget, p.category_id});
    return result;
  }

  // The pCVR window backing a campaign's expected_cvr (regenerated, not
  // stored: same stream, same draws).
  CvrHistory history(std::size_t campaign_index) const {
    const CampaignProfile& profile = campaigns_.at(campaign_index);
    std::mt19937_64 rng =
        detail::stream_rng(spec_.seed, kHistoryTag, campaign_index);
    CvrHistory history{profile.campaign_id, {}};
    history.observations.reserve(spec_.history_len);
    const BetaParams& params = categories_[profile.category].pcvr;
    for (int i = 0; i < spec_.history_len; ++i)
      history.observations.push_back(
          round6(detail::beta_draw(rng, params)));
    return history;
  }

  BidLogRecord record(std::int64_t pv_index) const {
    std::mt19937_64 rng = detail::stream_rng(
        spec_.seed, kPvTag, static_cast<std::uint64_t>(pv_index));

    BidLogRecord record;
    record.pv_id = detail::padded("pv", pv_index, 9);
    record.timestamp = spec_.start_timestamp + pv_index;
    record.user_id = detail::padded(
        "u", std::uniform_int_distribution<int>(0, spec_.n_users - 1)(rng), 6);
    record.position_id = detail::padded(
        "p", std::uniform_int_distribution<int>(0, spec_.n_positions - 1)(rng),
        2);
    record.n_slots = spec_.n_slots;

    const int n_cands = std::uniform_int_distribution<int>(
        spec_.candidates_per_pv.lo, spec_.candidates_per_pv.hi)(rng);

    // Partial Fisher-Yates over campaign indices: distinct campaigns per PV.
    std::vector<int> pool(spec_.n_campaigns);
    for (int i = 0; i < spec_.n_campaigns; ++i) pool[i] = i;
    record.candidates.reserve(n_cands);
    for (int k = 0; k < n_cands; ++k) {
      const int j = std::uniform_int_distribution<int>(
          k, spec_.n_campaigns - 1)(rng);
      std::swap(pool[k], pool[j]);
      const CampaignProfile& profile = campaigns_[pool[k]];
      const CategoryParams& cat = categories_[profile.category];

      AdCandidate c;
      c.campaign_id = profile.campaign_id;
      c.category_id = profile.category_id;
      c.bid = profile.bid;
      c.pctr = detail::clamp01(round6(detail::beta_draw(rng, cat.pctr)));
      c.pcvr = detail::clamp01(round6(detail::beta_draw(rng, cat.pcvr)));
      c.ppb = profile.ppb;
      c.expected_cvr = profile.expected_cvr;
      c.adjust_range = profile.adjust_range;
      if (cat.pasr)
        c.pasr = detail::clamp01(round6(detail::beta_draw(rng, *cat.pasr)));
      c.opt_authorized = profile.opt_authorized;
      record.candidates.push_back(std::move(c));
    }
    return record;
  }

  // Streaming source over [0, n_pv) in timestamp order.
  RecordSource source() const {
    auto next = std::make_shared<std::int64_t>(0);
    return [this, next]() -> std::optional<BidLogRecord> {
      if (*next >= spec_.n_pv) return std::nullopt;
      return record((*next)++);
    };
  }

 private:
  static constexpr std::uint64_t kCategoryTag = 1;
  static constexpr std::uint64_t kCampaignTag = 2;
  static constexpr std::uint64_t kHistoryTag = 3;
  static constexpr std::uint64_t kPvTag = 4;

  void build_categories() {
    categories_.reserve(spec_.n_categories);
    const double spread = std::log(spec_.category_spread);
    for (int k = 0; k < spec_.n_categories; ++k) {
      std::mt19937_64 rng = detail::stream_rng(spec_.seed, kCategoryTag, k);
      std::uniform_real_distribution<double> jitter(-spread, spread);
      CategoryParams params;
      params.pctr = {spec_.pctr.a * std::exp(jitter(rng)), spec_.pctr.b};
      params.pcvr = {spec_.pcvr.a * std::exp(jitter(rng)), spec_.pcvr.b};
      if (spec_.pasr)
        params.pasr = BetaParams{spec_.pasr->a * std::exp(jitter(rng)),
                                 spec_.pasr->b};
      params.ppb_shift = jitter(rng);
      categories_.push_back(params);
    }
  }

  void build_campaigns() {
    campaigns_.reserve(spec_.n_campaigns);
    const double rho = spec_.gmv_value_correlation;
    for (int i = 0; i < spec_.n_campaigns; ++i) {
      std::mt19937_64 rng = detail::stream_rng(spec_.seed, kCampaignTag, i);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);

      CampaignProfile profile;
      profile.campaign_id = detail::padded("c", i, 4);
      profile.category = i % spec_.n_categories;
      profile.category_id = detail::padded("k", profile.category, 2);

      // Latent value level drives ppb; the correlation knob leaks it into
      // the bid so pcvr*ppb vs bid dependence is tunable.
      const double value_z = normal(rng);
      const double noise_z = normal(rng);
      const CategoryParams& cat = categories_[profile.category];
      profile.ppb = std::max(
          round6(std::exp(spec_.ppb.mu + cat.ppb_shift +
                          spec_.ppb.sigma * value_z)),
          1e-6);
      profile.bid = std::max(
          round6(std::exp(spec_.bid.mu +
                          spec_.bid.sigma *
                              (rho * value_z +
                               std::sqrt(1.0 - rho * rho) * noise_z))),
          1e-6);
      profile.adjust_range = spec_.ra_choices[std::uniform_int_distribution<
          std::size_t>(0, spec_.ra_choices.size() - 1)(rng)];
      if (unit(rng) < spec_.budgeted_fraction)
        profile.budget = std::max(
            round6(std::exp(spec_.budget.mu + spec_.budget.sigma * normal(rng))),
            1e-6);
      profile.opt_authorized = unit(rng) >= spec_.opt_out_fraction;
      campaigns_.push_back(std::move(profile));
    }
    // expected_cvr closes the loop with the trimmed-mean estimator over the
    // campaign's own generated pCVR window.
    for (int i = 0; i < spec_.n_campaigns; ++i) {
      double estimate;
      try {
        estimate = expected_cvr(history(i), spec_.trim_fraction);
      } catch (const Error&) {
        estimate = 1e-6;  // degenerate all-zero window
      }
      campaigns_[i].expected_cvr = std::max(round6(estimate), 1e-6);
    }
  }

  GenSpec spec_;
  std::vector<CategoryParams> categories_;
  std::vector<CampaignProfile> campaigns_;
};

struct GenerateResult {
  std::int64_t records = 0;
  std::string content_hash;
};

inline json campaigns_to_json(const Generator& gen) {
  json campaigns = json::array();
  for (const CampaignProfile& p : gen.campaigns()) {
    json c{{"id", p.campaign_id}, {"cat", p.category_id}};
    if (p.budget)
      c["budget"] = *p.budget;
    else
      c["budget"] = nullptr;
    campaigns.push_back(std::move(c));
  }
  return campaigns;
}

// Writes the bid-log file for a spec: header line, then one PV per line in
// timestamp order. Deterministic for a given spec.
inline GenerateResult generate(const GenSpec& spec, const std::string& path) {
  const Generator gen(spec);
  BidLogWriter writer(path);
  writer.write_header(campaigns_to_json(gen), json(spec));
  for (std::int64_t i = 0; i < spec.n_pv; ++i)
    writer.write_record(gen.record(i));
  return {writer.records(), writer.content_hash()};
}

}  // namespace ocpc
