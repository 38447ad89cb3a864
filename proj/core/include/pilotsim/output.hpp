#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pilotsim/config.hpp"
#include "pilotsim/engine.hpp"

namespace pilotsim::output {

// Header of samples.csv; one row per scheduled UE per drop.
inline constexpr std::string_view kCsvHeader =
    "drop,bs,ue,scheme,tau,n_k,protected_flag,contamination_dbm,sinr_db,bs_throughput_mbps";

void write_samples_csv(std::ostream& out, const engine::CampaignResult& result);

// Percentiles of the values exactly as printed in samples.csv. Throughput
// statistics use one sample per (drop, bs).
struct Summary {
  engine::PercentileRow bs_throughput_mbps;
  engine::PercentileRow contamination_dbm;
  engine::PercentileRow sinr_db;
  std::size_t n_ue_samples = 0;
  std::size_t n_bs_samples = 0;
};

Summary summarize(const engine::CampaignResult& result);

/// summary.json body: config echo, sample counts, percentile tables,
/// invalid-drop counter and wall-clock time.
std::string summary_json(const engine::CampaignResult& result, const Summary& summary);

/// Writes samples.csv, summary.json and resolved_config.json into `dir`
/// (created if missing). Throws std::runtime_error on I/O failure.
Summary write_campaign(const std::filesystem::path& dir, const engine::CampaignResult& result);

struct TradeoffRow {
  std::string axis;
  std::string value;
  engine::SimConfig config;
  Summary summary;
};

inline constexpr std::string_view kTradeoffHeader =
    "axis,value,scheme,tau,n_k,protected_ues_per_bs,contamination_median_dbm,bs_throughput_median_mbps";

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows);

// Formatting shared by the writers, exposed for tests.
std::string format_fixed(double value, int decimals);

}  // namespace pilotsim::output
