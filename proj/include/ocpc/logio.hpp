#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocpc/domain.hpp"
#include "ocpc/errors.hpp"

namespace ocpc {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic formatting and hashing
// ---------------------------------------------------------------------------

// All numeric text output is fixed at six decimal places.
inline std::string fmt6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

inline std::string fmt6_opt(const std::optional<double>& value) {
  return value ? fmt6(*value) : std::string();
}

// Rounds to the 1e-6 currency/probability grid used by persisted values.
inline double round6(double value) {
  return std::round(value * 1e6) / 1e6;
}

// Streaming FNV-1a (64-bit) over raw bytes; used as the log content hash.
class Fnv1a64 {
 public:
  void update(const char* data, std::size_t size) {
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= static_cast<unsigned char>(data[i]);
      state_ *= 0x100000001B3ULL;
    }
  }
  void update(const std::string& text) { update(text.data(), text.size()); }

  std::uint64_t digest() const { return state_; }

  std::string hex() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  Fnv1a64 hash;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    hash.update(buf, static_cast<std::size_t>(in.gcount()));
  return hash.hex();
}

// ---------------------------------------------------------------------------
// Bid-log format: JSON Lines with a versioned header line
// ---------------------------------------------------------------------------

inline constexpr const char* kBidLogFormat = "ocpc-bidlog";
inline constexpr int kBidLogVersion = 1;

inline json candidate_to_json(const AdCandidate& c) {
  json j{{"id", c.campaign_id}, {"cat", c.category_id}, {"bid", c.bid},
         {"ctr", c.pctr},       {"cvr", c.pcvr},        {"ppb", c.ppb},
         {"ecvr", c.expected_cvr}, {"ra", c.adjust_range}};
  if (c.pasr) j["asr"] = *c.pasr;
  if (!c.opt_authorized) j["opt"] = false;
  return j;
}

inline json record_to_json(const BidLogRecord& record) {
  json ads = json::array();
  for (const AdCandidate& c : record.candidates)
    ads.push_back(candidate_to_json(c));
  return json{{"pv", record.pv_id},     {"ts", record.timestamp},
              {"user", record.user_id}, {"pos", record.position_id},
              {"slots", record.n_slots}, {"ads", std::move(ads)}};
}

inline AdCandidate candidate_from_json(const json& j) {
  AdCandidate c;
  c.campaign_id = j.at("id").get<std::string>();
  c.category_id = j.at("cat").get<std::string>();
  c.bid = j.at("bid").get<double>();
  c.pctr = j.at("ctr").get<double>();
  c.pcvr = j.at("cvr").get<double>();
  c.ppb = j.at("ppb").get<double>();
  c.expected_cvr = j.at("ecvr").get<double>();
  c.adjust_range = j.at("ra").get<double>();
  if (auto it = j.find("asr"); it != j.end()) c.pasr = it->get<double>();
  if (auto it = j.find("opt"); it != j.end()) c.opt_authorized = it->get<bool>();
  return c;
}

inline BidLogRecord record_from_json(const json& j) {
  BidLogRecord record;
  record.pv_id = j.at("pv").get<std::string>();
  record.timestamp = j.at("ts").get<std::int64_t>();
  record.user_id = j.at("user").get<std::string>();
  record.position_id = j.at("pos").get<std::string>();
  record.n_slots = j.at("slots").get<int>();
  const json& ads = j.at("ads");
  record.candidates.reserve(ads.size());
  for (const json& ad : ads) record.candidates.push_back(candidate_from_json(ad));
  return record;
}

class BidLogWriter {
 public:
  explicit BidLogWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) fail(Errc::io_error, "cannot open " + path + " for writing");
  }

  // The header carries the format version plus the campaign table (budgets)
  // and a generator echo, so a log is replayable on its own.
  void write_header(const json& campaigns, const json& gen_echo) {
    json header{{"format", kBidLogFormat},
                {"version", kBidLogVersion},
                {"campaigns", campaigns},
                {"gen", gen_echo}};
    write_line(header.dump());
  }

  void write_record(const BidLogRecord& record) {
    write_line(record_to_json(record).dump());
    ++records_;
  }

  std::int64_t records() const { return records_; }
  std::string content_hash() const { return hash_.hex(); }

 private:
  void write_line(const std::string& line) {
    out_ << line << '\n';
    hash_.update(line);
    hash_.update("\n", 1);
    if (!out_) fail(Errc::io_error, "write failed");
  }

  std::ofstream out_;
  Fnv1a64 hash_;
  std::int64_t records_ = 0;
};

class BidLogReader {
 public:
  explicit BidLogReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) fail(Errc::io_error, "cannot open " + path);
    std::string line;
    if (!std::getline(in_, line))
      fail(Errc::io_error, path + " is empty (missing header)");
    hash_.update(line);
    hash_.update("\n", 1);
    header_ = parse_line(line);
    if (header_.value("format", "") != kBidLogFormat ||
        header_.value("version", 0) != kBidLogVersion)
      fail(Errc::io_error, path + " is not a version-" +
                               std::to_string(kBidLogVersion) + " " +
                               kBidLogFormat + " file");
  }

  const json& header() const { return header_; }

  std::optional<BidLogRecord> next() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    hash_.update(line);
    hash_.update("\n", 1);
    ++line_number_;
    return record_from_json(parse_line(line));
  }

  // Valid once next() has returned nullopt.
  std::string content_hash() const { return hash_.hex(); }

  std::vector<Campaign> campaigns() const {
    std::vector<Campaign> result;
    if (auto it = header_.find("campaigns"); it != header_.end()) {
      for (const json& c : *it) {
        Campaign campaign;
        campaign.campaign_id = c.at("id").get<std::string>();
        campaign.category_id = c.value("cat", "");
        if (c.contains("budget") && !c.at("budget").is_null())
          campaign.budget = c.at("budget").get<double>();
        result.push_back(std::move(campaign));
      }
    }
    return result;
  }

 private:
  json parse_line(const std::string& line) const {
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded())
      fail(Errc::io_error,
           path_ + ": malformed JSON at line " + std::to_string(line_number_ + 1));
    return parsed;
  }

  std::string path_;
  std::ifstream in_;
  json header_;
  Fnv1a64 hash_;
  std::int64_t line_number_ = 0;
};

// ---------------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_manifest(const std::string& path, const json& manifest) {
  write_text_file(path, manifest.dump(2) + "\n");
}

inline json read_manifest(const std::string& path) {
  json parsed = json::parse(read_text_file(path), nullptr, false);
  if (parsed.is_discarded()) fail(Errc::io_error, "malformed manifest " + path);
  return parsed;
}

}  // namespace ocpc
