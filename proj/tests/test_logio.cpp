#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ocpc/logio.hpp"
#include "test_support.hpp"

using namespace ocpc;
using ocpc::test::expect_error;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "ocpc_logio_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool candidates_equal(const AdCandidate& a, const AdCandidate& b) {
  return a.campaign_id == b.campaign_id && a.category_id == b.category_id &&
         a.bid == b.bid && a.pctr == b.pctr && a.pcvr == b.pcvr &&
         a.ppb == b.ppb && a.expected_cvr == b.expected_cvr &&
         a.adjust_range == b.adjust_range && a.pasr == b.pasr &&
         a.opt_authorized == b.opt_authorized;
}

}  // namespace

TEST_CASE("fixed-point formatting") {
  CHECK(fmt6(1.0) == "1.000000");
  CHECK(fmt6(0.0123456) == "0.012346");
  CHECK(fmt6_opt(std::nullopt).empty());
  CHECK(round6(0.1234564999) == 0.123456);
  CHECK(round6(2.8) == 2.8);
}

TEST_CASE("fnv1a64 is stable") {
  Fnv1a64 hash;
  hash.update("hello\n");
  const std::string once = hash.hex();
  Fnv1a64 again;
  again.update("hello");
  again.update("\n", 1);
  CHECK(once == again.hex());
  CHECK(once.rfind("fnv1a64:", 0) == 0);
  CHECK(once != Fnv1a64().hex());
}

TEST_CASE("record JSON round trip preserves every field") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 200; ++round) {
    BidLogRecord record;
    record.pv_id = "pv" + std::to_string(round);
    record.timestamp = 1700000000000 + round;
    record.user_id = "u42";
    record.position_id = "p1";
    record.n_slots = 3;
    record.candidates = ocpc::test::random_candidates(rng, 1 + round % 7);
    for (AdCandidate& c : record.candidates) {
      c.bid = round6(c.bid);
      c.pctr = round6(c.pctr);
      c.pcvr = round6(c.pcvr);
      c.ppb = round6(c.ppb);
      c.expected_cvr = round6(c.expected_cvr);
      c.adjust_range = round6(c.adjust_range);
      if (c.pasr) c.pasr = round6(*c.pasr);
    }

    const BidLogRecord parsed = record_from_json(record_to_json(record));
    CHECK(parsed.pv_id == record.pv_id);
    CHECK(parsed.timestamp == record.timestamp);
    CHECK(parsed.n_slots == record.n_slots);
    REQUIRE(parsed.candidates.size() == record.candidates.size());
    for (std::size_t i = 0; i < parsed.candidates.size(); ++i)
      CHECK(candidates_equal(parsed.candidates[i], record.candidates[i]));
  }
}

TEST_CASE("bid-log writer and reader round trip") {
  const fs::path dir = temp_dir("roundtrip");
  const std::string path = (dir / "log.jsonl").string();

  std::mt19937_64 rng(103);
  std::vector<BidLogRecord> records;
  for (int i = 0; i < 20; ++i) {
    BidLogRecord record;
    record.pv_id = "pv" + std::to_string(i);
    record.timestamp = 1700000000000 + i;
    record.user_id = "u" + std::to_string(i % 3);
    record.position_id = "p0";
    record.n_slots = 2;
    record.candidates = ocpc::test::random_candidates(rng, 4);
    records.push_back(std::move(record));
  }

  std::string write_hash;
  {
    BidLogWriter writer(path);
    writer.write_header(json::array({{{"id", "c000"}, {"budget", 12.5}}}),
                        json{{"note", "test"}});
    for (const BidLogRecord& r : records) writer.write_record(r);
    write_hash = writer.content_hash();
    CHECK(writer.records() == 20);
  }

  BidLogReader reader(path);
  CHECK(reader.header().at("format") == kBidLogFormat);
  const auto campaigns = reader.campaigns();
  REQUIRE(campaigns.size() == 1);
  CHECK(campaigns[0].campaign_id == "c000");
  REQUIRE(campaigns[0].budget.has_value());
  CHECK(*campaigns[0].budget == 12.5);

  std::size_t count = 0;
  while (auto record = reader.next()) {
    CHECK(record->pv_id == records[count].pv_id);
    CHECK(record->candidates.size() == records[count].candidates.size());
    ++count;
  }
  CHECK(count == records.size());
  CHECK(reader.content_hash() == write_hash);
  CHECK(hash_file(path) == write_hash);
}

TEST_CASE("reader rejects broken inputs") {
  const fs::path dir = temp_dir("broken");

  SECTION("missing file") {
    expect_error(Errc::io_error,
                 [&] { BidLogReader((dir / "absent.jsonl").string()); });
  }

  SECTION("empty file") {
    const std::string path = (dir / "empty.jsonl").string();
    std::ofstream(path).close();
    expect_error(Errc::io_error, [&] { BidLogReader reader{path}; });
  }

  SECTION("wrong header") {
    const std::string path = (dir / "badheader.jsonl").string();
    write_text_file(path, "{\"format\":\"something-else\",\"version\":1}\n");
    expect_error(Errc::io_error, [&] { BidLogReader reader{path}; });
  }

  SECTION("malformed record line") {
    const std::string path = (dir / "badline.jsonl").string();
    write_text_file(
        path,
        "{\"format\":\"ocpc-bidlog\",\"version\":1,\"campaigns\":[]}\n"
        "this is not json\n");
    BidLogReader reader(path);
    expect_error(Errc::io_error, [&] { reader.next(); });
  }
}

TEST_CASE("manifest round trip") {
  const fs::path dir = temp_dir("manifest");
  const std::string path = (dir / "manifest.json").string();
  const json manifest{{"version", 1},
                      {"input_hash", "fnv1a64:00ff"},
                      {"config", {{"strategy", 2}}}};
  write_manifest(path, manifest);
  const json parsed = read_manifest(path);
  CHECK(parsed == manifest);
}
