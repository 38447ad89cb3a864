#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pilotsim/config.hpp"
#include "pilotsim/output.hpp"

using namespace pilotsim;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pilotsim_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

engine::SimConfig tiny() {
  engine::SimConfig c;
  c.n_antennas = 12;
  c.n_k = 4;
  c.tau = 2;
  c.scheme = srs::Scheme::kFrNa;
  c.protected_ues_per_bs = 2;
  c.n_drops = 3;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("empty file keeps every default", "[config]") {
  const auto parsed = config::parse_config_text("# nothing\n\n");
  const auto& c = std::get<engine::SimConfig>(parsed);
  const engine::SimConfig d;
  CHECK(c.n_antennas == d.n_antennas);
  CHECK(c.n_k == 32);
  CHECK(c.tau == 6);
  CHECK(c.scheme == srs::Scheme::kReuse1);
  CHECK(c.isd_m == 500.0);
  CHECK(c.bs_tx_power_dbm == 49.0);
  CHECK(c.ue_tx_power_dbm == 23.0);
  CHECK(c.carrier_ghz == 2.0);
  CHECK(c.bandwidth_hz == 20e6);
}

TEST_CASE("key = value parsing", "[config]") {
  const auto parsed = config::parse_config_text(
      "scheme = fr-na   # proposed scheme\n"
      "tau=4\n"
      "n_k = 40\n"
      "protected_ues_per_bs = 10\n"
      "seed = 18446744073709551615\n");
  const auto& c = std::get<engine::SimConfig>(parsed);
  CHECK(c.scheme == srs::Scheme::kFrNa);
  CHECK(c.tau == 4);
  CHECK(c.n_k == 40);
  CHECK(c.protected_ues_per_bs == 10);
  CHECK(c.seed == 18446744073709551615ull);
}

TEST_CASE("infeasible and malformed files are rejected with a line", "[config]") {
  try {
    config::parse_config_text("scheme = reuse3\ntau = 2\nn_k = 32\n", "a.cfg");
    FAIL("expected ConfigError");
  } catch (const config::ConfigError& e) {
    CHECK(std::string(e.what()).find("floor(32/3) = 10") != std::string::npos);
  }
  try {
    config::parse_config_text("tau = 2\nn_k = 8\ntau = 3\n", "b.cfg");
    FAIL("expected ConfigError");
  } catch (const config::ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("duplicate key 'tau'") != std::string::npos);
  }
  CHECK_THROWS_AS(config::parse_config_text("bogus = 1\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("tau = two\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("tau 2\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("scheme = reuse2\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("{\"tau\": 2, \"tau\": 3}"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_config(std::filesystem::path("/nonexistent/x.cfg")), config::ConfigError);
}

TEST_CASE("sweeps expand along one axis and are checked up front", "[config][sweep]") {
  const auto parsed = config::parse_config_text(
      "n_k = 16\nn_antennas = 64\nsweep.axis = tau\nsweep.values = 1, 2, 3\n");
  const auto& spec = std::get<config::SweepSpec>(parsed);
  const auto pts = spec.points();
  REQUIRE(pts.size() == 3);
  CHECK(pts[2].label == "3");
  CHECK(pts[2].config.tau == 3);
  CHECK(pts[0].config.n_k == 16);

  CHECK_THROWS_AS(config::parse_config_text("scheme = reuse3\nn_k = 16\nsweep.axis = tau\nsweep.values = 3, 2\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("sweep.axis = tau\n"), config::ConfigError);

  const auto schemes = std::get<config::SweepSpec>(
      config::parse_config_text("{\"sweep.axis\": \"scheme\", \"sweep.values\": [\"reuse1\", \"fr-cc\"]}"));
  CHECK(schemes.points()[1].config.scheme == srs::Scheme::kFrCc);
}

TEST_CASE("resolved config round-trips through the parser", "[config]") {
  auto c = tiny();
  c.isd_m = 450.0;
  const auto text = config::to_json(c);
  const auto back = std::get<engine::SimConfig>(config::parse_config_text(text));
  CHECK(config::to_json(back) == text);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.size() == config::known_keys().size() - 2);
  CHECK(j["scheme"] == "fr-na");
}

TEST_CASE("format_fixed never prints negative zero", "[output]") {
  CHECK(output::format_fixed(-0.00001, 4) == "0.0000");
  CHECK(output::format_fixed(-1.5, 2) == "-1.50");
  CHECK(output::format_fixed(2.0, 0) == "2");
}

TEST_CASE("samples.csv and summary.json follow the schema", "[output]") {
  const auto result = engine::run_campaign(tiny(), 1);
  const auto dir = scratch("schema");
  const auto summary = output::write_campaign(dir, result);

  const auto rows = read_csv(slurp(dir / "samples.csv"));
  REQUIRE(!rows.empty());
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  CHECK(header == output::kCsvHeader);
  CHECK(header == "drop,bs,ue,scheme,tau,n_k,protected_flag,contamination_dbm,sinr_db,bs_throughput_mbps");
  CHECK(rows.size() == 1 + 3 * 57 * 4);

  std::vector<double> cont, sinr, thr;
  std::map<std::pair<int, int>, double> per_bs;
  int protected_rows = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    REQUIRE(row.size() == 10);
    CHECK(row[3] == "fr-na");
    CHECK(row[4] == "2");
    CHECK(row[5] == "4");
    CHECK((row[6] == "0" || row[6] == "1"));
    protected_rows += row[6] == "1";
    cont.push_back(std::stod(row[7]));
    sinr.push_back(std::stod(row[8]));
    const auto key = std::pair{std::stoi(row[0]), std::stoi(row[1])};
    const double t = std::stod(row[9]);
    if (per_bs.count(key)) CHECK(per_bs[key] == t);
    per_bs[key] = t;
  }
  CHECK(protected_rows == 3 * 57 * 2);
  for (const auto& [k, t] : per_bs) thr.push_back(t);
  CHECK(thr.size() == 3u * 57u);

  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  for (const char* key : {"scheme", "tau", "n_k", "n_antennas", "protected_ues_per_bs", "n_drops", "seed",
                          "n_bs_samples", "n_ue_samples", "invalid_drops", "wall_clock_s", "bs_throughput_mbps",
                          "contamination_dbm", "sinr_db"})
    CHECK(j.contains(key));
  CHECK(j["n_ue_samples"] == cont.size());
  CHECK(j["n_bs_samples"] == thr.size());

  // Summary percentiles are those of the CSV columns.
  const std::vector<std::pair<const char*, std::vector<double>*>> cols = {
      {"contamination_dbm", &cont}, {"sinr_db", &sinr}, {"bs_throughput_mbps", &thr}};
  for (const auto& [name, v] : cols) {
    for (auto [pk, q] : {std::pair{"p5", 0.05}, std::pair{"p50", 0.5}, std::pair{"p95", 0.95}}) {
      INFO(name << " " << pk);
      CHECK(j[name][pk].get<double>() == Approx(engine::percentile(*v, q)).epsilon(1e-12));
    }
  }
  CHECK(summary.contamination_dbm.p50 == Approx(engine::percentile(cont, 0.5)).epsilon(1e-12));
  std::filesystem::remove_all(dir);
}

TEST_CASE("re-running resolved_config.json reproduces samples.csv byte for byte", "[output][determinism]") {
  const auto first = scratch("first");
  output::write_campaign(first, engine::run_campaign(tiny(), 2));
  const auto replay = std::get<engine::SimConfig>(config::parse_config(first / "resolved_config.json"));
  const auto second = scratch("second");
  output::write_campaign(second, engine::run_campaign(replay, 1));
  CHECK(slurp(first / "samples.csv") == slurp(second / "samples.csv"));
  CHECK(slurp(first / "resolved_config.json") == slurp(second / "resolved_config.json"));
  std::filesystem::remove_all(first);
  std::filesystem::remove_all(second);
}

TEST_CASE("trade-off table", "[output]") {
  output::TradeoffRow row{"tau", "3", tiny(), {}};
  row.summary.contamination_dbm.p50 = -87.25;
  row.summary.bs_throughput_mbps.p50 = 953.5;
  std::ostringstream out;
  output::write_tradeoff_csv(out, {row});
  CHECK(out.str() == std::string(output::kTradeoffHeader) + "\ntau,3,fr-na,2,4,2,-87.2500,953.500000\n");
}
