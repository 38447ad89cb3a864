#include "pilotsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pilotsim/phy.hpp"

namespace pilotsim::output {
namespace {

constexpr int kDbDecimals = 4;
constexpr int kMbpsDecimals = 6;

double reparse(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

std::string db_string(double db) { return format_fixed(db, kDbDecimals); }
std::string mbps_string(double bps) { return format_fixed(bps / 1e6, kMbpsDecimals); }

nlohmann::ordered_json row_json(const engine::PercentileRow& r) {
  return {{"p5", r.p5}, {"p50", r.p50}, {"p95", r.p95}};
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // Keep "-0.0000" out of the output.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_samples_csv(std::ostream& out, const engine::CampaignResult& result) {
  const auto& c = result.config;
  const std::string scheme(srs::to_string(c.scheme));
  out << kCsvHeader << '\n';
  for (const auto& d : result.drops) {
    for (const auto& u : d.ues) {
      out << d.drop << ',' << u.bs << ',' << u.ue << ',' << scheme << ',' << c.tau << ',' << c.n_k << ','
          << (u.is_protected ? 1 : 0) << ',' << db_string(phy::contamination_dbm(u.contamination_w)) << ','
          << db_string(10.0 * std::log10(u.sinr)) << ',' << mbps_string(d.bs_throughput[u.bs]) << '\n';
    }
  }
}

Summary summarize(const engine::CampaignResult& result) {
  std::vector<double> thr, cont, sinr;
  for (const auto& d : result.drops) {
    for (double t : d.bs_throughput) thr.push_back(reparse(mbps_string(t)));
    for (const auto& u : d.ues) {
      cont.push_back(reparse(db_string(phy::contamination_dbm(u.contamination_w))));
      sinr.push_back(reparse(db_string(10.0 * std::log10(u.sinr))));
    }
  }
  Summary s;
  s.n_bs_samples = thr.size();
  s.n_ue_samples = cont.size();
  if (!thr.empty()) s.bs_throughput_mbps = engine::percentiles(thr);
  if (!cont.empty()) {
    s.contamination_dbm = engine::percentiles(cont);
    s.sinr_db = engine::percentiles(sinr);
  }
  return s;
}

std::string summary_json(const engine::CampaignResult& result, const Summary& s) {
  const auto& c = result.config;
  nlohmann::ordered_json j;
  j["scheme"] = std::string(srs::to_string(c.scheme));
  j["tau"] = c.tau;
  j["n_k"] = c.n_k;
  j["n_antennas"] = c.n_antennas;
  j["protected_ues_per_bs"] = c.protected_per_bs();
  j["n_drops"] = c.n_drops;
  j["seed"] = c.seed;
  j["n_bs_samples"] = s.n_bs_samples;
  j["n_ue_samples"] = s.n_ue_samples;
  j["invalid_drops"] = result.invalid_drops;
  j["wall_clock_s"] = result.wall_clock_s;
  j["bs_throughput_mbps"] = row_json(s.bs_throughput_mbps);
  j["contamination_dbm"] = row_json(s.contamination_dbm);
  j["sinr_db"] = row_json(s.sinr_db);
  return j.dump(2) + "\n";
}

Summary write_campaign(const std::filesystem::path& dir, const engine::CampaignResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream csv;
  write_samples_csv(csv, result);
  write_file(dir / "samples.csv", csv.str());

  const auto summary = summarize(result);
  write_file(dir / "summary.json", summary_json(result, summary));
  write_file(dir / "resolved_config.json", config::to_json(result.config));
  return summary;
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows) {
  out << kTradeoffHeader << '\n';
  for (const auto& r : rows) {
    out << r.axis << ',' << r.value << ',' << srs::to_string(r.config.scheme) << ',' << r.config.tau << ','
        << r.config.n_k << ',' << r.config.protected_per_bs() << ','
        << format_fixed(r.summary.contamination_dbm.p50, kDbDecimals) << ','
        << format_fixed(r.summary.bs_throughput_mbps.p50, kMbpsDecimals) << '\n';
  }
}

}  // namespace pilotsim::output
