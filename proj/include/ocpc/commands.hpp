#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocpc/datagen.hpp"
#include "ocpc/logio.hpp"
#include "ocpc/metrics.hpp"
#include "ocpc/reports.hpp"
#include "ocpc/simulator.hpp"

// Subcommand implementations behind the argv layer, so experiments and tests
// can drive the exact CLI behavior in-process.

namespace ocpc {

namespace fs = std::filesystem;

inline std::string strategy_label(const StrategyConfig& config) {
  return "Str " + std::to_string(static_cast<int>(config.strategy));
}

inline json config_echo(const StrategyConfig& c) {
  json j{{"strategy", static_cast<int>(c.strategy)},
         {"objective", c.objective.name()},
         {"alpha", c.objective.alpha},
         {"objective_w", c.objective.w},
         {"w", c.w},
         {"tc", c.calibration_threshold},
         {"reserve", c.reserve_score},
         {"enforce_budget", c.enforce_budget}};
  j["ra_override"] = c.ra_override ? json(*c.ra_override) : json(nullptr);
  j["slots_override"] =
      c.slots_override ? json(*c.slots_override) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

inline GenSpec load_gen_spec(const std::string& spec_path) {
  json parsed = json::parse(read_text_file(spec_path), nullptr, false);
  if (parsed.is_discarded())
    fail(Errc::io_error, "malformed spec file " + spec_path);
  GenSpec spec = parsed.get<GenSpec>();
  spec.validate();
  return spec;
}

inline GenerateResult cmd_generate(const GenSpec& spec,
                                   const std::string& out_path,
                                   std::ostream& out = std::cout) {
  const GenerateResult result = generate(spec, out_path);
  out << "records=" << result.records << " hash=" << result.content_hash
      << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateResult {
  MetricsReport report;
  ReplayStats stats;
  std::string input_hash;
};

// One replay of a log file into out_dir: ledger.csv, report.csv,
// histogram.csv, manifest.json. Everything is streamed; only per-campaign
// state and histogram counts stay resident.
inline SimulateResult simulate_run(const std::string& log_path,
                                   const std::string& out_dir,
                                   const StrategyConfig& config) {
  fs::create_directories(out_dir);
  BidLogReader reader(log_path);
  const std::vector<Campaign> campaigns = reader.campaigns();

  std::ofstream ledger_out(fs::path(out_dir) / "ledger.csv",
                           std::ios::binary);
  if (!ledger_out) fail(Errc::io_error, "cannot write ledger.csv");
  ledger_out << ledger_csv_header();

  MetricsTotals totals;
  std::vector<AdjustmentRecord> adjustments;
  const RowSink sink = [&](const LedgerRow& row) {
    ledger_out << ledger_row_csv(row);
    totals.add_impression(row.pctr, row.pcvr, row.ppb, row.pasr,
                          row.price_per_click);
    adjustments.push_back({row.b_star, row.bid, row.r_a});
  };

  SimulateResult result;
  result.stats = replay_stream([&reader] { return reader.next(); }, config,
                               campaigns, sink);
  ledger_out.flush();
  if (!ledger_out) fail(Errc::io_error, "write failed: ledger.csv");
  result.input_hash = reader.content_hash();
  result.report = finalize(totals);

  write_text_file((fs::path(out_dir) / "report.csv").string(),
                  metrics_report_csv(result.report));
  if (!adjustments.empty())
    write_text_file((fs::path(out_dir) / "histogram.csv").string(),
                    histogram_csv(adjustment_histogram(adjustments)));

  json manifest{{"version", 1},
                {"input_file", fs::path(log_path).filename().string()},
                {"input_hash", result.input_hash},
                {"pvs", result.stats.pvs},
                {"skipped", result.stats.skipped},
                {"rows", result.stats.rows},
                {"config", config_echo(config)}};
  write_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
  return result;
}

inline SimulateResult cmd_simulate(const std::string& log_path,
                                   const std::string& out_dir,
                                   const StrategyConfig& config,
                                   std::ostream& out = std::cout) {
  const SimulateResult result = simulate_run(log_path, out_dir, config);
  out << summary_table(strategy_label(config), result.report);
  return result;
}

// Adjustment-range sweep: one sub-run per value, plus a combined table of
// the absolute metrics per range.
inline std::vector<std::pair<double, SimulateResult>> cmd_simulate_sweep(
    const std::string& log_path, const std::string& out_dir,
    const StrategyConfig& base_config, const std::vector<double>& ra_values,
    std::ostream& out = std::cout) {
  if (ra_values.empty()) fail(Errc::invalid_spec, "empty --sweep-ra list");
  std::vector<std::pair<double, SimulateResult>> results;
  TextTable table;
  table.add_row({"r_a", "RPM", "GPM", "ROI", "CTR", "CVR", "PPC"});
  for (double ra : ra_values) {
    StrategyConfig config = base_config;
    config.ra_override = ra;
    const std::string sub_dir =
        (fs::path(out_dir) / ("ra_" + fmt6(ra))).string();
    SimulateResult result = simulate_run(log_path, sub_dir, config);
    const MetricsReport& r = result.report;
    table.add_row({fmt6(ra), fmt6_opt(r.rpm), fmt6_opt(r.gpm), fmt6_opt(r.roi),
                   fmt6_opt(r.ctr), fmt6_opt(r.cvr), fmt6_opt(r.ppc)});
    results.emplace_back(ra, std::move(result));
  }
  const std::string rendered = table.render();
  write_text_file((fs::path(out_dir) / "sweep.txt").string(), rendered);
  out << rendered;
  return results;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareResult {
  CompareReport deltas;
  CampaignBreakdown campaigns;
  CategoryBreakdown categories;
};

// Compares two simulate runs over the identical input log (manifest hashes
// must match) and emits the delta and breakdown tables.
inline CompareResult cmd_compare(const std::string& base_dir,
                                 const std::string& test_dir,
                                 const std::optional<std::string>& out_dir,
                                 std::ostream& out = std::cout,
                                 double min_conversions = 5.0) {
  const json base_manifest =
      read_manifest((fs::path(base_dir) / "manifest.json").string());
  const json test_manifest =
      read_manifest((fs::path(test_dir) / "manifest.json").string());
  const std::string base_hash = base_manifest.value("input_hash", "");
  const std::string test_hash = test_manifest.value("input_hash", "");
  if (base_hash.empty() || base_hash != test_hash)
    fail(Errc::manifest_mismatch,
         "runs replay different logs: " + base_hash + " vs " + test_hash);

  const MetricsReport base_report = metrics_report_from_csv(
      read_text_file((fs::path(base_dir) / "report.csv").string()));
  const MetricsReport test_report = metrics_report_from_csv(
      read_text_file((fs::path(test_dir) / "report.csv").string()));

  CompareResult result;
  result.deltas = compare(base_report, test_report);

  Ledger base_ledger, test_ledger;
  base_ledger.rows =
      parse_ledger_csv((fs::path(base_dir) / "ledger.csv").string());
  test_ledger.rows =
      parse_ledger_csv((fs::path(test_dir) / "ledger.csv").string());
  result.campaigns =
      per_campaign_report(test_ledger, base_ledger, min_conversions);
  result.categories = per_category_report(test_ledger, base_ledger);

  const std::string test_label =
      "Str " + std::to_string(test_manifest["config"].value("strategy", -1));
  out << comparison_table({{test_label, result.deltas}});
  out << "\nTop campaigns by base cost (>= " << fmt6(min_conversions)
      << " expected conversions):\n";
  out << campaign_table(result.campaigns);
  out << "\n" << campaign_proportions_table(result.campaigns);
  out << "\n" << category_proportions_table(result.categories);

  if (out_dir) {
    fs::create_directories(*out_dir);
    write_text_file((fs::path(*out_dir) / "deltas.csv").string(),
                    deltas_csv(result.deltas));
    write_text_file((fs::path(*out_dir) / "campaigns.csv").string(),
                    campaign_breakdown_csv(result.campaigns));
    write_text_file((fs::path(*out_dir) / "categories.csv").string(),
                    category_breakdown_csv(result.categories));
  }
  return result;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalResult {
  double auc_value = 0.0;
  double gauc_value = 0.0;
  std::size_t groups = 0;
  std::size_t removed_groups = 0;
  GapCurve curve;
};

// Scores file: CSV with header user,position,score,label,predicted,realized.
inline EvalResult cmd_eval(const std::string& scores_path,
                           GaucWeight weight_mode,
                           const std::optional<std::string>& out_dir,
                           std::size_t n_buckets = 20,
                           std::ostream& out = std::cout) {
  std::ifstream in(scores_path);
  if (!in) fail(Errc::io_error, "cannot open " + scores_path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "user,position,score,label,predicted,realized")
    fail(Errc::io_error, scores_path + ": unexpected header");

  std::vector<LabeledScore> samples;
  std::vector<GapSample> gaps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 6) fail(Errc::io_error, scores_path + ": bad row");
    samples.push_back(
        {cells[0], cells[1], std::stod(cells[2]), std::stoi(cells[3])});
    gaps.push_back({std::stod(cells[4]), std::stod(cells[5])});
  }
  if (samples.empty()) fail(Errc::empty_samples, scores_path);

  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>>
      group_stats;  // (positives, total)
  for (const LabeledScore& s : samples) {
    auto& [pos, total] = group_stats[{s.user_id, s.position_id}];
    pos += s.label != 0;
    ++total;
  }

  EvalResult result;
  result.groups = group_stats.size();
  for (const auto& [key, stat] : group_stats)
    if (stat.first == 0 || stat.first == stat.second) ++result.removed_groups;
  result.auc_value = auc(samples);
  result.gauc_value = gauc(samples, weight_mode);
  result.curve = gap_curve(gaps, n_buckets);

  out << "AUC=" << fmt6(result.auc_value)
      << " GAUC=" << fmt6(result.gauc_value) << " groups=" << result.groups
      << " removed_single_class_groups=" << result.removed_groups << "\n";

  const std::string curve_path =
      out_dir ? (fs::path(*out_dir) / "gap_curve.csv").string()
              : (fs::path(scores_path).parent_path() / "gap_curve.csv").string();
  if (out_dir) fs::create_directories(*out_dir);
  write_text_file(curve_path, gap_curve_csv(result.curve));
  return result;
}

}  // namespace ocpc
