// pilotsim: runs SRS allocation campaigns or sweeps from a configuration file
// and writes samples.csv / summary.json / resolved_config.json.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <variant>

#include "CLI11.hpp"
#include "pilotsim/config.hpp"
#include "pilotsim/engine.hpp"
#include "pilotsim/output.hpp"

namespace {

constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  unsigned threads = 0;
  bool quiet = false;
};

void apply_overrides(pilotsim::engine::SimConfig& c, const Options& opt) {
  if (opt.seed) c.seed = *opt.seed;
  if (opt.drops) c.n_drops = *opt.drops;
}

pilotsim::output::Summary run_one(const pilotsim::engine::SimConfig& config, const std::filesystem::path& dir,
                                  const Options& opt, const std::string& label) {
  pilotsim::engine::ProgressFn progress;
  if (!opt.quiet) {
    progress = [&label](int done, int total) {
      std::fprintf(stderr, "\r[%s] drop %d/%d", label.c_str(), done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  }
  const auto result = pilotsim::engine::run_campaign(config, opt.threads, progress);
  const auto summary = pilotsim::output::write_campaign(dir, result);
  if (!opt.quiet) {
    std::fprintf(stderr, "[%s] median contamination %.2f dBm, median BS throughput %.2f Mbit/s (%d invalid drops)\n",
                 label.c_str(), summary.contamination_dbm.p50, summary.bs_throughput_mbps.p50, result.invalid_drops);
  }
  return summary;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"System-level simulator for uplink SRS allocation in massive MIMO networks"};
  Options opt;
  app.add_option("--config", opt.config_path, "Configuration file (key = value, or resolved_config.json)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_dir, "Output directory")->required();
  app.add_option("--seed", opt.seed, "Master seed (overrides the file)");
  app.add_option("--drops", opt.drops, "Number of drops (overrides the file)")->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "Worker threads (0 = all cores); results do not depend on it");
  app.add_flag("--quiet", opt.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }

  pilotsim::config::ParsedConfig parsed;
  std::vector<pilotsim::config::SweepPoint> points;
  try {
    parsed = pilotsim::config::parse_config(opt.config_path);
    if (auto* c = std::get_if<pilotsim::engine::SimConfig>(&parsed)) {
      apply_overrides(*c, opt);
      pilotsim::engine::validate(*c);
    } else {
      auto& sweep = std::get<pilotsim::config::SweepSpec>(parsed);
      apply_overrides(sweep.base, opt);
      points = sweep.points();
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    const std::filesystem::path out(opt.out_dir);
    if (auto* c = std::get_if<pilotsim::engine::SimConfig>(&parsed)) {
      run_one(*c, out, opt, std::string(pilotsim::srs::to_string(c->scheme)));
      return 0;
    }

    const auto& sweep = std::get<pilotsim::config::SweepSpec>(parsed);
    const std::string axis(pilotsim::config::to_string(sweep.axis));
    std::vector<pilotsim::output::TradeoffRow> rows;
    for (const auto& p : points) {
      const auto label = axis + "_" + p.label;
      auto summary = run_one(p.config, out / label, opt, label);
      rows.push_back({axis, p.label, p.config, summary});
    }
    std::ofstream table(out / "tradeoff.csv", std::ios::binary | std::ios::trunc);
    pilotsim::output::write_tradeoff_csv(table, rows);
    if (!table) throw std::runtime_error("cannot write " + (out / "tradeoff.csv").string());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return 0;
}
