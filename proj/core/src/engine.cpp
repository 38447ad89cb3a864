#include "pilotsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/random/uniform_int_distribution.hpp>

#include "pilotsim/phy.hpp"

namespace pilotsim::engine {

int SimConfig::protected_per_bs() const {
  switch (scheme) {
    case srs::Scheme::kReuse1: return 0;
    case srs::Scheme::kReuse3: return n_k;
    case srs::Scheme::kFrCc:
    case srs::Scheme::kFrNa: return protected_ues_per_bs;
  }
  return 0;
}

srs::SrsPool SimConfig::pool() const {
  const int n = srs::pool_capacity(tau);
  switch (scheme) {
    case srs::Scheme::kReuse1: return srs::SrsPool::with_protected(tau, 0);
    case srs::Scheme::kReuse3: return srs::SrsPool::with_protected(tau, 3 * (n / 3));
    case srs::Scheme::kFrCc:
    case srs::Scheme::kFrNa: return srs::SrsPool::with_protected(tau, 3 * protected_ues_per_bs);
  }
  throw std::logic_error("SimConfig::pool: unknown scheme");
}

channel::PropagationParams SimConfig::propagation() const {
  channel::PropagationParams p;
  p.carrier_ghz = carrier_ghz;
  p.bs_height = bs_height_m;
  p.ue_height = ue_height_m;
  p.downtilt_deg = downtilt_deg;
  return p;
}

std::optional<std::string> check_config(const SimConfig& c) {
  auto str = [](auto v) { return std::to_string(v); };
  if (c.tau < 1 || c.tau > srs::kSymbolsPerSubframe)
    return "tau=" + str(c.tau) + " outside [1, " + str(srs::kSymbolsPerSubframe) + "]";
  if (c.n_k < 1) return "n_k must be at least 1";
  if (c.n_antennas < 1) return "n_antennas must be at least 1";
  if (c.n_k > c.n_antennas)
    return "n_k=" + str(c.n_k) + " exceeds n_antennas=" + str(c.n_antennas) + " (ZF needs N_K <= N_A)";
  if (c.n_drops < 1) return "n_drops must be at least 1";
  if (c.n_sites != 19) return "n_sites must be 19";
  if (!(c.isd_m > 0.0)) return "isd_m must be positive";
  if (!(c.bandwidth_hz > 0.0)) return "bandwidth_hz must be positive";
  if (!(c.carrier_ghz > 0.0)) return "carrier_ghz must be positive";
  if (!(c.bs_height_m > 1.0) || !(c.ue_height_m > 1.0)) return "antenna heights must exceed 1 m";
  if (!(c.min_distance_m >= 10.0) || !(c.min_distance_m < 0.5 * c.isd_m))
    return "min_distance_m must lie in [10, isd_m / 2)";
  if (c.ue_density < 1) return "ue_density must be at least 1";

  const int n_p = srs::pool_capacity(c.tau);
  switch (c.scheme) {
    case srs::Scheme::kReuse1:
      if (c.n_k > n_p) return "budget: N_K=" + str(c.n_k) + " needs >= " + str(c.n_k) + " sequences, have " + str(n_p);
      break;
    case srs::Scheme::kReuse3:
      if (3 * c.n_k > n_p)
        return "budget: N_K=" + str(c.n_k) + " needs >= 3*" + str(c.n_k) + " = " + str(3 * c.n_k) +
               " sequences, have " + str(n_p) + " (reuse3 allows at most floor(" + str(n_p) +
               "/3) = " + str(n_p / 3) + ")";
      break;
    case srs::Scheme::kFrCc:
    case srs::Scheme::kFrNa: {
      const int prot = c.protected_ues_per_bs;
      if (prot < 0 || prot > c.n_k)
        return "protected_ues_per_bs=" + str(prot) + " must lie in [0, n_k=" + str(c.n_k) + "]";
      const int need = 3 * prot + (c.n_k - prot);
      if (need > n_p)
        return "budget: N_K=" + str(c.n_k) + " needs >= 3*" + str(prot) + "+" + str(c.n_k - prot) + " = " +
               str(need) + " sequences, have " + str(n_p);
      break;
    }
  }
  return std::nullopt;
}

void validate(const SimConfig& config) {
  if (auto err = check_config(config)) throw std::invalid_argument(*err);
}

std::optional<srs::ScheduledUes> schedule(std::span<const int> association, int n_bs, int n_k, Rng& rng) {
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_bs));
  for (std::size_t u = 0; u < association.size(); ++u) members.at(association[u]).push_back(static_cast<int>(u));

  srs::ScheduledUes out(static_cast<std::size_t>(n_bs));
  for (int b = 0; b < n_bs; ++b) {
    auto& m = members[b];
    if (static_cast<int>(m.size()) < n_k) return std::nullopt;
    const int n = static_cast<int>(m.size());
    for (int i = 0; i < n_k; ++i) {
      boost::random::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(m[i], m[pick(rng)]);
    }
    out[b].assign(m.begin(), m.begin() + n_k);
    std::sort(out[b].begin(), out[b].end());
  }
  return out;
}

std::optional<DropSetup> prepare_drop(const SimConfig& config, const geometry::NetworkLayout& layout, int drop_index,
                                      int attempt) {
  const std::uint64_t base =
      derive_seed(config.seed, {static_cast<std::uint64_t>(drop_index), static_cast<std::uint64_t>(attempt)});
  auto stream = [base](Stream s) { return make_rng(base, {static_cast<std::uint64_t>(s)}); };

  DropSetup setup;
  {
    Rng rng = stream(Stream::kPlacement);
    setup.drop = geometry::drop_ues(layout, config.n_ue(), rng, config.min_distance_m);
    setup.drop.height = config.ue_height_m;
  }
  {
    Rng rng = stream(Stream::kLargeScale);
    setup.large_scale = channel::large_scale(layout, setup.drop, rng, config.propagation());
  }
  const auto gains = setup.large_scale.gain_table();
  setup.drop.association = geometry::associate_ues(layout.n_bs(), setup.drop.n_ue(), gains);

  {
    Rng rng = stream(Stream::kSchedule);
    auto sched = schedule(setup.drop.association, layout.n_bs(), config.n_k, rng);
    if (!sched) return std::nullopt;
    setup.scheduled = std::move(*sched);
  }

  // Rankings use long-term received powers (UE tx power + large-scale gain).
  if (srs::is_fractional(config.scheme)) {
    const int n_ue = setup.drop.n_ue();
    setup.rankings.resize(setup.scheduled.size());
    for (int b = 0; b < layout.n_bs(); ++b) {
      const auto& ues = setup.scheduled[b];
      std::vector<double> power(ues.size());
      for (std::size_t k = 0; k < ues.size(); ++k) {
        const int u = ues[k];
        if (config.scheme == srs::Scheme::kFrCc) {
          power[k] = config.ue_tx_power_dbm + gains[static_cast<std::size_t>(b) * n_ue + u];
        } else {
          double best = -std::numeric_limits<double>::infinity();
          for (int j = 0; j < layout.n_bs(); ++j)
            if (j != b) best = std::max(best, gains[static_cast<std::size_t>(j) * n_ue + u]);
          power[k] = config.ue_tx_power_dbm + best;
        }
      }
      setup.rankings[b] = config.scheme == srs::Scheme::kFrCc ? srs::rank_cell_centric(ues, power)
                                                               : srs::rank_neighbour_aware(ues, power);
    }
  }

  {
    Rng rng = stream(Stream::kAllocation);
    setup.assignment = srs::allocate(config.scheme, config.pool(), setup.scheduled, setup.rankings, rng);
  }
  setup.small_scale_seed = derive_seed(base, {static_cast<std::uint64_t>(Stream::kSmallScale)});
  setup.noise_seed = derive_seed(base, {static_cast<std::uint64_t>(Stream::kNoise)});
  return setup;
}

std::optional<TtiMetrics> try_drop(const SimConfig& config, const geometry::NetworkLayout& layout, int drop_index,
                                   int attempt) {
  auto setup = prepare_drop(config, layout, drop_index, attempt);
  if (!setup) return std::nullopt;

  const int n_bs = layout.n_bs();
  const double rho = phy::dbm_to_w(config.ue_tx_power_dbm);
  const double p_bs = phy::dbm_to_w(config.bs_tx_power_dbm);
  const double noise_ul = phy::noise_power_w(config.noise_psd_dbm_hz, config.bandwidth_hz, config.bs_noise_figure_db);
  const double noise_dl = phy::noise_power_w(config.noise_psd_dbm_hz, config.bandwidth_hz, config.ue_noise_figure_db);

  std::vector<int> flat_ues, serving, offset(static_cast<std::size_t>(n_bs) + 1, 0);
  for (int b = 0; b < n_bs; ++b) {
    for (int u : setup->scheduled[b]) {
      flat_ues.push_back(u);
      serving.push_back(b);
    }
    offset[b + 1] = static_cast<int>(flat_ues.size());
  }
  const auto flat_seq = phy::flatten_sequences(setup->assignment);
  const srs::CollisionSets collisions(setup->assignment);

  // Training and data share the realizations (block fading); one BS at a
  // time keeps the memory footprint at a single N_A x S matrix.
  phy::SinrAccumulator acc(serving, offset);
  std::vector<double> contamination(flat_ues.size(), 0.0);
  for (int b = 0; b < n_bs; ++b) {
    Rng small = make_rng(setup->small_scale_seed, {static_cast<std::uint64_t>(b)});
    const auto h = channel::bs_channels(setup->large_scale, b, flat_ues, config.n_antennas, small);

    Rng noise = make_rng(setup->noise_seed, {static_cast<std::uint64_t>(b)});
    const auto y = phy::received_pilots_at(h, flat_seq, setup->assignment.n_sequences, rho, noise_ul, noise);
    const auto estimate = phy::ls_estimate(y, setup->assignment.sequence[b], rho);

    phy::PrecoderSet w;
    try {
      w = phy::zf_precoder(estimate, p_bs, b);
    } catch (const phy::IllConditionedChannel&) {
      return std::nullopt;
    }
    acc.add_bs(b, h, w);

    const auto c = phy::contamination_at(h, b, collisions, setup->assignment, offset, rho);
    std::copy(c.begin(), c.end(), contamination.begin() + offset[b]);
  }
  const auto sinr = acc.sinr(noise_dl);

  TtiMetrics m;
  m.drop = drop_index;
  m.tau = config.tau;
  m.bandwidth_hz = config.bandwidth_hz;
  m.ues.reserve(flat_ues.size());
  for (int b = 0; b < n_bs; ++b) {
    for (int s = offset[b]; s < offset[b + 1]; ++s) {
      const int k = s - offset[b];
      m.ues.push_back({b, flat_ues[s], setup->assignment.is_protected[b][k] != 0, contamination[s], sinr[s]});
    }
    m.bs_throughput.push_back(phy::bs_throughput(std::span(sinr).subspan(offset[b], offset[b + 1] - offset[b]),
                                                 config.tau, m.t_total, config.bandwidth_hz));
  }
  return m;
}

TtiMetrics run_drop(const SimConfig& config, const geometry::NetworkLayout& layout, int drop_index,
                    int max_attempts) {
  for (int attempt = 0; attempt <= max_attempts; ++attempt) {
    if (auto m = try_drop(config, layout, drop_index, attempt)) {
      m->invalid_attempts = attempt;
      return std::move(*m);
    }
  }
  throw std::runtime_error("drop " + std::to_string(drop_index) + " stayed invalid after " +
                           std::to_string(max_attempts) +
                           " resamples; a BS keeps running short of UEs or the estimates are singular "
                           "(raise ue_density or lower n_k)");
}

std::size_t CampaignResult::n_bs_samples() const {
  std::size_t n = 0;
  for (const auto& d : drops) n += d.bs_throughput.size();
  return n;
}

std::size_t CampaignResult::n_ue_samples() const {
  std::size_t n = 0;
  for (const auto& d : drops) n += d.ues.size();
  return n;
}

std::vector<double> CampaignResult::bs_throughput_samples() const {
  std::vector<double> v;
  v.reserve(n_bs_samples());
  for (const auto& d : drops) v.insert(v.end(), d.bs_throughput.begin(), d.bs_throughput.end());
  return v;
}

std::vector<double> CampaignResult::contamination_dbm_samples() const {
  std::vector<double> v;
  v.reserve(n_ue_samples());
  for (const auto& d : drops)
    for (const auto& u : d.ues) v.push_back(phy::contamination_dbm(u.contamination_w));
  return v;
}

std::vector<double> CampaignResult::sinr_db_samples() const {
  std::vector<double> v;
  v.reserve(n_ue_samples());
  for (const auto& d : drops)
    for (const auto& u : d.ues) v.push_back(10.0 * std::log10(u.sinr));
  return v;
}

CampaignResult run_campaign(const SimConfig& config, unsigned threads, const ProgressFn& progress) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto layout = geometry::build_layout(config.isd_m, config.n_sites);

  CampaignResult result;
  result.config = config;
  result.drops.resize(static_cast<std::size_t>(config.n_drops));

  const int cap = 10 * config.n_drops;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.n_drops));

  std::atomic<int> next{0};
  std::atomic<int> completed{0};
  std::atomic<int> invalid{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;

  auto worker = [&] {
    for (;;) {
      const int d = next.fetch_add(1);
      if (d >= config.n_drops || failed.load()) return;
      try {
        auto m = run_drop(config, layout, d, cap);
        if (invalid.fetch_add(m.invalid_attempts) + m.invalid_attempts > cap)
          throw std::runtime_error("invalid-drop resampling exceeded " + std::to_string(cap) +
                                   " attempts; check n_k against ue_density");
        result.drops[d] = std::move(m);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      const int done = completed.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mu);
        progress(done, config.n_drops);
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  result.invalid_drops = invalid.load();
  result.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double percentile(std::span<const double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("percentile: empty sample set");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("percentile: q outside [0, 1]");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

PercentileRow percentiles(std::span<const double> samples) {
  return {percentile(samples, 0.05), percentile(samples, 0.50), percentile(samples, 0.95)};
}

}  // namespace pilotsim::engine
