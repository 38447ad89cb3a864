#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotsim/channel.hpp"
#include "pilotsim/geometry.hpp"
#include "pilotsim/rng.hpp"
#include "pilotsim/srs_alloc.hpp"

namespace pilotsim::engine {

// One campaign. Physical defaults follow the 3GPP macro evaluation setup.
struct SimConfig {
  int n_antennas = 128;
  int n_k = 32;
  int tau = 6;
  srs::Scheme scheme = srs::Scheme::kReuse1;
  int protected_ues_per_bs = 16;  // fractional schemes only
  int n_drops = 200;
  std::uint64_t seed = 1;

  double isd_m = 500.0;
  int n_sites = 19;
  double carrier_ghz = 2.0;
  double bandwidth_hz = 20e6;
  double bs_tx_power_dbm = 49.0;
  double ue_tx_power_dbm = 23.0;
  double noise_psd_dbm_hz = -174.0;
  double ue_noise_figure_db = 9.0;
  double bs_noise_figure_db = 5.0;
  double bs_height_m = 25.0;
  double ue_height_m = 1.5;
  double downtilt_deg = 12.0;
  double min_distance_m = 35.0;
  // UEs dropped per BS, as a multiple of n_k.
  int ue_density = 4;

  int n_bs() const { return 3 * n_sites; }
  int n_ue() const { return n_bs() * n_k * ue_density; }
  /// UEs drawing from protected pilots in every BS for this scheme.
  int protected_per_bs() const;
  srs::SrsPool pool() const;
  channel::PropagationParams propagation() const;
};

/// Empty when the configuration is runnable, otherwise a diagnostic naming the
/// violated constraint (pilot budget, antenna count, ranges).
std::optional<std::string> check_config(const SimConfig& config);

/// Throws std::invalid_argument with the check_config diagnostic.
void validate(const SimConfig& config);

/// Uniform subset of n_k associated UEs per BS (ascending UE id within a BS),
/// or nullopt when some BS has fewer than n_k associated UEs.
std::optional<srs::ScheduledUes> schedule(std::span<const int> association, int n_bs, int n_k, Rng& rng);

struct UeSample {
  int bs = 0;
  int ue = 0;
  bool is_protected = false;
  double contamination_w = 0.0;
  double sinr = 0.0;  // linear
};

// Metrics of one drop (one subframe of training followed by data).
struct TtiMetrics {
  int drop = 0;
  int invalid_attempts = 0;
  int tau = 0;
  int t_total = srs::kSymbolsPerSubframe;
  double bandwidth_hz = 0.0;
  std::vector<UeSample> ues;            // scheduled UEs, BS by BS
  std::vector<double> bs_throughput;    // bit/s, per BS
};

// Everything a drop attempt produces before the PHY stage; exposed so that
// tests can replay the PHY on the same realizations.
struct DropSetup {
  geometry::UeDrop drop;
  channel::LargeScaleMap large_scale;
  srs::ScheduledUes scheduled;
  std::vector<std::vector<int>> rankings;
  srs::SrsAssignment assignment;
  std::uint64_t small_scale_seed = 0;
  std::uint64_t noise_seed = 0;
};

/// Placement, large-scale state, association, scheduling, ranking and pilot
/// allocation for one attempt; nullopt when scheduling fails.
std::optional<DropSetup> prepare_drop(const SimConfig& config, const geometry::NetworkLayout& layout, int drop_index,
                                      int attempt);

/// Full pipeline for one attempt; nullopt when the attempt is invalid
/// (a BS short of UEs or an ill-conditioned estimate).
std::optional<TtiMetrics> try_drop(const SimConfig& config, const geometry::NetworkLayout& layout, int drop_index,
                                   int attempt);

/// Runs attempts 0, 1, ... of `drop_index` until one is valid.
/// Throws std::runtime_error after `max_attempts` invalid attempts.
TtiMetrics run_drop(const SimConfig& config, const geometry::NetworkLayout& layout, int drop_index,
                    int max_attempts);

struct PercentileRow {
  double p5 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

struct CampaignResult {
  SimConfig config;
  std::vector<TtiMetrics> drops;  // ordered by drop index
  int invalid_drops = 0;
  double wall_clock_s = 0.0;

  std::size_t n_bs_samples() const;
  std::size_t n_ue_samples() const;
  std::vector<double> bs_throughput_samples() const;      // bit/s
  std::vector<double> contamination_dbm_samples() const;  // with the -250 dBm floor
  std::vector<double> sinr_db_samples() const;
};

using ProgressFn = std::function<void(int completed, int total)>;

/// Runs n_drops drops on `threads` workers (0 = hardware concurrency). Output
/// is independent of the thread count.
CampaignResult run_campaign(const SimConfig& config, unsigned threads = 0, const ProgressFn& progress = {});

/// Linear-interpolation quantile: h = (n - 1) q between the order statistics.
double percentile(std::span<const double> samples, double q);

PercentileRow percentiles(std::span<const double> samples);

}  // namespace pilotsim::engine
