#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ocpc/objectives.hpp"
#include "test_support.hpp"

using namespace ocpc;
using ocpc::test::expect_error;

namespace {

AdCandidate candidate(double pctr, double pcvr, double ppb, double r_a = 0.4) {
  AdCandidate c;
  c.campaign_id = "c000";
  c.category_id = "k000";
  c.bid = 1.0;
  c.pctr = pctr;
  c.pcvr = pcvr;
  c.ppb = ppb;
  c.expected_cvr = 0.01;
  c.adjust_range = r_a;
  return c;
}

}  // namespace

TEST_CASE("f2 matches the worked example rows") {
  const AuctionContext ctx;
  // pctr 0.04, pcvr*v = 5, b* = 2.8 -> 0.2 + 0.112.
  const AdCandidate ad1 = candidate(0.04, 0.05, 100.0);
  CHECK(std::abs(evaluate(ObjectiveSpec::f2(1.0), ad1, 2.8, ctx) - 0.312) <
        1e-12);
  // pctr 0.04, pcvr*v = 2.5, b* = 1 -> 0.14.
  const AdCandidate ad4 = candidate(0.04, 0.025, 100.0);
  CHECK(std::abs(evaluate(ObjectiveSpec::f2(1.0), ad4, 1.0, ctx) - 0.14) <
        1e-12);
}

TEST_CASE("f1 ignores the bid and zero pcvr kills the score") {
  const AuctionContext ctx;
  const AdCandidate dead = candidate(0.07, 0.0, 500.0);
  CHECK(evaluate(ObjectiveSpec::f1(), dead, 0.5, ctx) == 0.0);
  CHECK(evaluate(ObjectiveSpec::f1(), dead, 5.0, ctx) == 0.0);

  const AdCandidate live = candidate(0.05, 0.02, 100.0);
  CHECK(evaluate(ObjectiveSpec::f1(), live, 0.5, ctx) ==
        evaluate(ObjectiveSpec::f1(), live, 5.0, ctx));
}

TEST_CASE("sigma composite at the auction mean reduces to eCPM") {
  const auto spec =
      ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::gmv, 6.0);
  std::vector<AdCandidate> cands{candidate(0.04, 0.02, 100.0),
                                 candidate(0.05, 0.02, 100.0)};
  const AuctionContext ctx = make_auction_context(cands, spec);
  // Both candidates sit exactly at the mean signal, so sigma vanishes.
  CHECK(std::abs(evaluate(spec, cands[0], 2.0, ctx) - 0.04 * 2.0) < 1e-12);
  CHECK(std::abs(evaluate(spec, cands[1], 1.5, ctx) - 0.05 * 1.5) < 1e-12);
}

TEST_CASE("sigma composite stays within the adjustment band") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto spec =
      ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::gmv, 6.0);
  for (int round = 0; round < 2000; ++round) {
    std::vector<AdCandidate> cands;
    for (int i = 0; i < 5; ++i)
      cands.push_back(candidate(0.01 + 0.1 * unit(rng), 0.001 + 0.1 * unit(rng),
                                1.0 + 100.0 * unit(rng), 0.4));
    const AuctionContext ctx = make_auction_context(cands, spec);
    for (const AdCandidate& c : cands) {
      const double b_star = 0.5 + 3.0 * unit(rng);
      const double score = evaluate(spec, c, b_star, ctx);
      CHECK(score >= c.pctr * b_star * (1.0 - c.adjust_range) - 1e-12);
      CHECK(score <= c.pctr * b_star * (1.0 + c.adjust_range) + 1e-12);
    }
  }
}

TEST_CASE("every variant is monotone nondecreasing in b_star") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<ObjectiveSpec> specs{
      ObjectiveSpec::f1(), ObjectiveSpec::f2(0.0), ObjectiveSpec::f2(1.5),
      ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::gmv, 6.0),
      ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::cvr, 2.0)};
  for (int round = 0; round < 2000; ++round) {
    std::vector<AdCandidate> cands;
    for (int i = 0; i < 4; ++i)
      cands.push_back(candidate(0.2 * unit(rng), 0.001 + 0.2 * unit(rng),
                                100.0 * unit(rng)));
    for (const ObjectiveSpec& spec : specs) {
      const AuctionContext ctx = make_auction_context(cands, spec);
      double b1 = 0.1 + 4.0 * unit(rng);
      double b2 = 0.1 + 4.0 * unit(rng);
      if (b1 > b2) std::swap(b1, b2);
      CHECK(evaluate(spec, cands[0], b1, ctx) <=
            evaluate(spec, cands[0], b2, ctx) + 1e-12);
    }
  }
}

TEST_CASE("f2 with a huge alpha orders like pure eCPM") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const AuctionContext ctx;
  const ObjectiveSpec greedy = ObjectiveSpec::f2(1e9);
  for (int round = 0; round < 500; ++round) {
    std::vector<AdCandidate> cands;
    std::vector<double> b_star;
    for (int i = 0; i < 6; ++i) {
      cands.push_back(candidate(0.01 + 0.2 * unit(rng), 0.2 * unit(rng),
                                100.0 * unit(rng)));
      b_star.push_back(0.1 + 4.0 * unit(rng));
    }
    std::size_t best_f2 = 0, best_ecpm = 0;
    for (std::size_t i = 1; i < cands.size(); ++i) {
      if (evaluate(greedy, cands[i], b_star[i], ctx) >
          evaluate(greedy, cands[best_f2], b_star[best_f2], ctx))
        best_f2 = i;
      if (cands[i].pctr * b_star[i] > cands[best_ecpm].pctr * b_star[best_ecpm])
        best_ecpm = i;
    }
    CHECK(best_f2 == best_ecpm);
  }
}

TEST_CASE("asr objective requires pasr and a positive normalizer") {
  const auto spec =
      ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::asr, 6.0);

  std::vector<AdCandidate> no_asr{candidate(0.04, 0.02, 100.0)};
  expect_error(Errc::missing_asr,
               [&] { make_auction_context(no_asr, spec); });

  std::vector<AdCandidate> zero_asr{candidate(0.04, 0.02, 100.0)};
  zero_asr[0].pasr = 0.0;
  const AuctionContext ctx = make_auction_context(zero_asr, spec);
  expect_error(Errc::zero_normalizer,
               [&] { evaluate(spec, zero_asr[0], 1.0, ctx); });

  // A candidate without pasr is fine under non-ASR objectives.
  const AuctionContext gmv_ctx =
      make_auction_context(no_asr, ObjectiveSpec::f2(1.0));
  CHECK_NOTHROW(evaluate(ObjectiveSpec::f2(1.0), no_asr[0], 1.0, gmv_ctx));
}

TEST_CASE("zero normalizer for the gmv signal") {
  const auto spec =
      ObjectiveSpec::sigma_composite(ObjectiveSpec::Signal::gmv, 6.0);
  std::vector<AdCandidate> worthless{candidate(0.04, 0.0, 0.0),
                                     candidate(0.05, 0.0, 0.0)};
  const AuctionContext ctx = make_auction_context(worthless, spec);
  expect_error(Errc::zero_normalizer,
               [&] { evaluate(spec, worthless[0], 1.0, ctx); });
}

TEST_CASE("objective names parse and round-trip") {
  CHECK(parse_objective("f1", 0.0, 1.0).variant == ObjectiveSpec::Variant::f1);
  const ObjectiveSpec f2 = parse_objective("f2", 2.5, 1.0);
  CHECK(f2.variant == ObjectiveSpec::Variant::f2);
  CHECK(f2.alpha == 2.5);
  const ObjectiveSpec sg = parse_objective("sigma-gmv", 0.0, 6.0);
  CHECK(sg.signal == ObjectiveSpec::Signal::gmv);
  CHECK(sg.w == 6.0);
  CHECK(sg.name() == "sigma-gmv");
  CHECK(parse_objective("sigma-cvr", 0.0, 2.0).name() == "sigma-cvr");
  CHECK(parse_objective("sigma-asr", 0.0, 2.0).name() == "sigma-asr");
  expect_error(Errc::invalid_spec, [] { parse_objective("f3", 0.0, 1.0); });
}
