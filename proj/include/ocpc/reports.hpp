#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ocpc/calibration.hpp"
#include "ocpc/logio.hpp"
#include "ocpc/metrics.hpp"
#include "ocpc/simulator.hpp"

namespace ocpc {

// Signed percentage at six decimals; undefined markers render as "n/a".
inline std::string pct(const std::optional<double>& value) {
  if (!value) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.6f%%", *value * 100.0);
  return buf;
}

// Minimal aligned-column renderer for the human-readable tables.
class TextTable {
 public:
  void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string render() const {
    std::vector<std::size_t> widths;
    for (const auto& row : rows_) {
      if (widths.size() < row.size()) widths.resize(row.size(), 0);
      for (std::size_t i = 0; i < row.size(); ++i)
        widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << "  ";
        out << std::string(widths[i] - row[i].size(), ' ') << row[i];
      }
      out << '\n';
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// CSV renderers
// ---------------------------------------------------------------------------

inline std::string metrics_report_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "impressions," << fmt6(r.impressions) << "\n";
  out << "clicks," << fmt6(r.clicks) << "\n";
  out << "conversions," << fmt6(r.conversions) << "\n";
  out << "gmv," << fmt6(r.gmv) << "\n";
  out << "cost," << fmt6(r.cost) << "\n";
  out << "asr_adds," << fmt6(r.asr_adds) << "\n";
  out << "rpm," << fmt6_opt(r.rpm) << "\n";
  out << "gpm," << fmt6_opt(r.gpm) << "\n";
  out << "roi," << fmt6_opt(r.roi) << "\n";
  out << "ctr," << fmt6_opt(r.ctr) << "\n";
  out << "cvr," << fmt6_opt(r.cvr) << "\n";
  out << "ppc," << fmt6_opt(r.ppc) << "\n";
  out << "asr," << fmt6_opt(r.asr) << "\n";
  return out.str();
}

inline std::optional<double> parse_opt(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return std::stod(cell);
}

inline MetricsReport metrics_report_from_csv(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const std::string key = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (key == "impressions") r.impressions = std::stod(value);
    else if (key == "clicks") r.clicks = std::stod(value);
    else if (key == "conversions") r.conversions = std::stod(value);
    else if (key == "gmv") r.gmv = std::stod(value);
    else if (key == "cost") r.cost = std::stod(value);
    else if (key == "asr_adds") r.asr_adds = std::stod(value);
    else if (key == "rpm") r.rpm = parse_opt(value);
    else if (key == "gpm") r.gpm = parse_opt(value);
    else if (key == "roi") r.roi = parse_opt(value);
    else if (key == "ctr") r.ctr = parse_opt(value);
    else if (key == "cvr") r.cvr = parse_opt(value);
    else if (key == "ppc") r.ppc = parse_opt(value);
    else if (key == "asr") r.asr = parse_opt(value);
  }
  return r;
}

inline const char* ledger_csv_header() {
  return "pv_id,slot,campaign_id,category_id,pctr,pcvr,ppb,pasr,b_star,"
         "price_per_click,bid,r_a\n";
}

inline std::string ledger_row_csv(const LedgerRow& row) {
  std::ostringstream out;
  out << row.pv_id << ',' << row.slot << ',' << row.campaign_id << ','
      << row.category_id << ',' << fmt6(row.pctr) << ',' << fmt6(row.pcvr)
      << ',' << fmt6(row.ppb) << ',' << fmt6_opt(row.pasr) << ','
      << fmt6(row.b_star) << ',' << fmt6(row.price_per_click) << ','
      << fmt6(row.bid) << ',' << fmt6(row.r_a) << '\n';
  return out.str();
}

inline std::vector<LedgerRow> parse_ledger_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  std::vector<LedgerRow> rows;
  std::string line;
  if (!std::getline(in, line) || line + "\n" != ledger_csv_header())
    fail(Errc::io_error, path + ": missing ledger header");
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
    if (cells.size() != 12) fail(Errc::io_error, path + ": bad ledger row");
    LedgerRow row;
    row.pv_id = cells[0];
    row.slot = std::stoi(cells[1]);
    row.campaign_id = cells[2];
    row.category_id = cells[3];
    row.pctr = std::stod(cells[4]);
    row.pcvr = std::stod(cells[5]);
    row.ppb = std::stod(cells[6]);
    row.pasr = parse_opt(cells[7]);
    row.b_star = std::stod(cells[8]);
    row.price_per_click = std::stod(cells[9]);
    row.bid = std::stod(cells[10]);
    row.r_a = std::stod(cells[11]);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string histogram_csv(const AdjustmentHistogram& hist) {
  std::ostringstream out;
  out << "bin,count,proportion\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b)
    out << b << ',' << hist.counts[b] << ',' << fmt6(hist.proportions[b])
        << '\n';
  return out.str();
}

inline std::string gap_curve_csv(const GapCurve& curve) {
  std::ostringstream out;
  out << "bucket_index,mean_pred,mean_real,ratio,count\n";
  for (std::size_t b = 0; b < curve.buckets.size(); ++b) {
    const GapBucket& bucket = curve.buckets[b];
    out << b << ',' << fmt6(bucket.mean_predicted) << ','
        << fmt6(bucket.mean_real) << ',' << fmt6_opt(bucket.ratio) << ','
        << bucket.count << '\n';
  }
  return out.str();
}

inline std::string deltas_csv(const CompareReport& deltas) {
  std::ostringstream out;
  out << "metric,delta\n";
  for (const auto& [name, value] : deltas.items())
    out << name << ',' << fmt6_opt(value) << '\n';
  return out.str();
}

inline std::string campaign_breakdown_csv(const CampaignBreakdown& breakdown) {
  std::ostringstream out;
  out << "campaign_id,base_cost,base_conversions,d_gmv,d_cost,d_pv,d_gpm,"
         "d_roi,outcome\n";
  for (const CampaignComparison& row : breakdown.rows)
    out << row.campaign_id << ',' << fmt6(row.base.cost) << ','
        << fmt6(row.base.conversions) << ',' << fmt6_opt(row.deltas.gmv) << ','
        << fmt6_opt(row.deltas.cost) << ',' << fmt6_opt(row.deltas.pv) << ','
        << fmt6_opt(row.deltas.gpm) << ',' << fmt6_opt(row.deltas.roi) << ','
        << outcome_name(row.outcome) << '\n';
  return out.str();
}

inline std::string category_breakdown_csv(const CategoryBreakdown& breakdown) {
  std::ostringstream out;
  out << "category_id,base_pv,test_pv,base_share,test_share,share_variation,"
         "d_gpm,d_roi,class\n";
  for (const CategoryShift& row : breakdown.rows) {
    const CompareReport d = compare(row.base, row.test);
    out << row.category_id << ',' << fmt6(row.base_pv) << ','
        << fmt6(row.test_pv) << ',' << fmt6(row.base_share) << ','
        << fmt6(row.test_share) << ',' << fmt6_opt(row.share_variation) << ','
        << fmt6_opt(d.gpm) << ',' << fmt6_opt(d.roi) << ','
        << category_class_name(row.cls) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Human-readable tables
// ---------------------------------------------------------------------------

inline std::string summary_table(const std::string& label,
                                 const MetricsReport& r) {
  TextTable table;
  table.add_row({"", "RPM", "GPM", "ROI", "CTR", "CVR", "PPC"});
  table.add_row({label, fmt6_opt(r.rpm), fmt6_opt(r.gpm), fmt6_opt(r.roi),
                 fmt6_opt(r.ctr), fmt6_opt(r.cvr), fmt6_opt(r.ppc)});
  return table.render();
}

// One comparison row per labelled run, in the overall-results layout.
inline std::string comparison_table(
    const std::vector<std::pair<std::string, CompareReport>>& rows) {
  TextTable table;
  table.add_row({"", "RPM", "GPM", "ROI", "CTR", "CVR", "PPC"});
  for (const auto& [label, d] : rows)
    table.add_row({label, pct(d.rpm), pct(d.gpm), pct(d.roi), pct(d.ctr),
                   pct(d.cvr), pct(d.ppc)});
  return table.render();
}

inline std::string campaign_table(const CampaignBreakdown& breakdown,
                                  std::size_t max_rows = 10) {
  TextTable table;
  table.add_row({"", "GMV", "Cost", "PV", "GPM", "ROI"});
  std::size_t shown = 0;
  for (const CampaignComparison& row : breakdown.rows) {
    if (shown++ >= max_rows) break;
    table.add_row({row.campaign_id, pct(row.deltas.gmv), pct(row.deltas.cost),
                   pct(row.deltas.pv), pct(row.deltas.gpm),
                   pct(row.deltas.roi)});
  }
  return table.render();
}

inline std::string campaign_proportions_table(
    const CampaignBreakdown& breakdown) {
  TextTable table;
  table.add_row({"", "% Campaigns"});
  table.add_row({"GPM and ROI are improved",
                 pct(std::optional<double>(breakdown.improved_share()))});
  table.add_row({"Quantity and quality exchange",
                 pct(std::optional<double>(breakdown.exchanged_share()))});
  return table.render();
}

inline std::string category_proportions_table(
    const CategoryBreakdown& breakdown) {
  TextTable table;
  table.add_row({"", "% Category", "% PV"});
  const char* labels[4] = {"GPM and ROI are improved", "GPM is improved",
                           "Quantity and quality exchange", "Other"};
  for (int k = 0; k < 4; ++k)
    table.add_row({labels[k],
                   pct(std::optional<double>(breakdown.category_share[k])),
                   pct(std::optional<double>(breakdown.pv_share[k]))});
  return table.render();
}

// Adjustment-range sweep in the per-range layout.
inline std::string sweep_table(
    const std::vector<std::pair<double, CompareReport>>& rows) {
  TextTable table;
  table.add_row({"r_a", "RPM", "GPM", "ROI", "CTR", "CVR", "PPC"});
  for (const auto& [ra, d] : rows)
    table.add_row({fmt6(ra), pct(d.rpm), pct(d.gpm), pct(d.roi), pct(d.ctr),
                   pct(d.cvr), pct(d.ppc)});
  return table.render();
}

}  // namespace ocpc
