#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pilotsim/engine.hpp"
#include "pilotsim/phy.hpp"

using namespace pilotsim;
using namespace pilotsim::engine;
using Catch::Approx;

namespace {

SimConfig small_config(srs::Scheme scheme = srs::Scheme::kReuse1) {
  SimConfig c;
  c.n_antennas = 16;
  c.n_k = 4;
  c.tau = 1;
  c.scheme = scheme;
  c.protected_ues_per_bs = 2;
  c.n_drops = 3;
  c.seed = 2024;
  return c;
}

bool same_metrics(const TtiMetrics& a, const TtiMetrics& b) {
  if (a.ues.size() != b.ues.size() || a.bs_throughput != b.bs_throughput) return false;
  for (std::size_t i = 0; i < a.ues.size(); ++i) {
    const auto &x = a.ues[i], &y = b.ues[i];
    if (x.bs != y.bs || x.ue != y.ue || x.is_protected != y.is_protected || x.sinr != y.sinr ||
        x.contamination_w != y.contamination_w)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("percentile uses linear interpolation between order statistics", "[engine][percentile]") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::reverse(v.begin(), v.end());
  CHECK(percentile(v, 0.05) == Approx(5.95));
  CHECK(percentile(v, 0.5) == Approx(50.5));
  CHECK(percentile(v, 0.95) == Approx(95.05));
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 100.0);
  CHECK(percentile(std::vector<double>{7.0}, 0.3) == 7.0);
  const auto row = percentiles(v);
  CHECK(row.p50 == Approx(50.5));
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(percentile(v, 1.5), std::invalid_argument);
}

TEST_CASE("scheduling draws a uniform subset per BS", "[engine][schedule]") {
  // BS 0 owns UEs 0..9, BS 1 owns UEs 10..13.
  std::vector<int> assoc(14, 0);
  std::fill(assoc.begin() + 10, assoc.end(), 1);
  Rng rng(3);
  std::vector<int> hits(10, 0);
  constexpr int kTrials = 6000;
  for (int t = 0; t < kTrials; ++t) {
    const auto s = schedule(assoc, 2, 3, rng);
    REQUIRE(s);
    REQUIRE((*s)[0].size() == 3);
    CHECK(std::is_sorted((*s)[0].begin(), (*s)[0].end()));
    for (int u : (*s)[0]) ++hits[u];
    for (int u : (*s)[1]) CHECK(u >= 10);
  }
  // Each UE is picked with probability 3/10.
  const double mean = kTrials * 0.3, sd = std::sqrt(kTrials * 0.3 * 0.7);
  for (int h : hits) CHECK(std::abs(h - mean) < 4.0 * sd);

  CHECK(!schedule(assoc, 2, 5, rng));
}

TEST_CASE("configuration checks", "[engine][config]") {
  SimConfig c;
  CHECK(!check_config(c));

  c.scheme = srs::Scheme::kReuse3;
  c.tau = 2;
  c.n_k = 32;
  auto err = check_config(c);
  REQUIRE(err);
  CHECK(err->find("floor(32/3) = 10") != std::string::npos);

  c = SimConfig{};
  c.scheme = srs::Scheme::kFrNa;
  c.tau = 4;
  c.n_k = 44;
  c.n_antennas = 64;
  c.protected_ues_per_bs = 10;
  CHECK(!check_config(c));
  c.protected_ues_per_bs = 11;
  err = check_config(c);
  REQUIRE(err);
  CHECK(err->find("3*11+33 = 66") != std::string::npos);

  c = SimConfig{};
  c.n_k = 200;
  CHECK(check_config(c));
  c = SimConfig{};
  c.tau = 0;
  CHECK(check_config(c));
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("pool layout per scheme", "[engine][config]") {
  SimConfig c;
  c.tau = 4;
  c.scheme = srs::Scheme::kReuse3;
  CHECK(c.pool().protected_count == 63);
  c.scheme = srs::Scheme::kFrCc;
  c.protected_ues_per_bs = 10;
  CHECK(c.pool().protected_count == 30);
  CHECK(c.protected_per_bs() == 10);
  c.scheme = srs::Scheme::kReuse1;
  CHECK(c.pool().protected_count == 0);
  CHECK(c.protected_per_bs() == 0);
  CHECK(c.n_ue() == 57 * 32 * 4);
}

TEST_CASE("a drop is a pure function of (seed, drop index)", "[engine][determinism]") {
  const auto c = small_config();
  const auto layout = geometry::build_layout(c.isd_m);
  const auto a = run_drop(c, layout, 1, 10);
  const auto b = run_drop(c, layout, 1, 10);
  const auto other = run_drop(c, layout, 2, 10);
  CHECK(same_metrics(a, b));
  CHECK(!same_metrics(a, other));
  CHECK(a.ues.size() == 57u * 4u);
  CHECK(a.bs_throughput.size() == 57u);
}

TEST_CASE("campaign output does not depend on the thread count", "[engine][determinism]") {
  auto c = small_config(srs::Scheme::kFrNa);
  c.tau = 2;
  c.n_drops = 4;
  const auto one = run_campaign(c, 1);
  const auto many = run_campaign(c, 3);
  REQUIRE(one.drops.size() == many.drops.size());
  for (std::size_t d = 0; d < one.drops.size(); ++d) {
    CHECK(one.drops[d].drop == static_cast<int>(d));
    CHECK(same_metrics(one.drops[d], many.drops[d]));
  }
  CHECK(one.n_bs_samples() == 4u * 57u);
  CHECK(one.n_ue_samples() == 4u * 57u * 4u);
}

TEST_CASE("all-training subframe carries no data", "[engine]") {
  auto c = small_config();
  c.tau = 14;
  const auto layout = geometry::build_layout(c.isd_m);
  const auto m = run_drop(c, layout, 0, 10);
  for (double t : m.bs_throughput) CHECK(t == 0.0);
  for (const auto& u : m.ues) {
    CHECK(std::isfinite(u.sinr));
    CHECK(u.sinr >= 0.0);
  }
}

TEST_CASE("schemes share every realization except the pilot allocation", "[engine]") {
  const auto layout = geometry::build_layout(500.0);
  const auto cc = prepare_drop(small_config(srs::Scheme::kFrCc), layout, 0, 0);
  const auto na = prepare_drop(small_config(srs::Scheme::kFrNa), layout, 0, 0);
  const auto r1 = prepare_drop(small_config(srs::Scheme::kReuse1), layout, 0, 0);
  REQUIRE(cc);
  REQUIRE(na);
  REQUIRE(r1);
  CHECK(cc->drop.positions == na->drop.positions);
  CHECK(cc->drop.association == r1->drop.association);
  CHECK(cc->scheduled == na->scheduled);
  CHECK(cc->small_scale_seed == na->small_scale_seed);
  CHECK(cc->noise_seed == r1->noise_seed);
  CHECK(cc->large_scale.gain_table() == r1->large_scale.gain_table());
  CHECK(cc->rankings != na->rankings);
}

TEST_CASE("rankings protect the intended UEs", "[engine][ranking]") {
  const auto layout = geometry::build_layout(500.0);
  for (auto scheme : {srs::Scheme::kFrCc, srs::Scheme::kFrNa}) {
    const auto c = small_config(scheme);
    const auto s = prepare_drop(c, layout, 0, 0);
    REQUIRE(s);
    const auto g = s->large_scale.gain_table();
    const int n_ue = s->drop.n_ue();
    auto metric = [&](int b, int u) {
      if (scheme == srs::Scheme::kFrCc) return -g[static_cast<std::size_t>(b) * n_ue + u];
      double best = -1e300;
      for (int j = 0; j < 57; ++j)
        if (j != b) best = std::max(best, g[static_cast<std::size_t>(j) * n_ue + u]);
      return best;
    };
    for (int b = 0; b < 57; ++b) {
      // Every protected UE outranks every unprotected one.
      double worst_protected = 1e300, best_open = -1e300;
      for (std::size_t k = 0; k < s->scheduled[b].size(); ++k) {
        const double m = metric(b, s->scheduled[b][k]);
        if (s->assignment.is_protected[b][k]) worst_protected = std::min(worst_protected, m);
        else best_open = std::max(best_open, m);
      }
      CHECK(worst_protected >= best_open);
      CHECK(std::count(s->assignment.is_protected[b].begin(), s->assignment.is_protected[b].end(), 1) == 2);
    }
  }
}

TEST_CASE("streamed drop matches the whole-network PHY replay", "[engine]") {
  auto c = small_config(srs::Scheme::kFrCc);
  c.tau = 2;
  const auto layout = geometry::build_layout(c.isd_m);
  const auto setup = prepare_drop(c, layout, 0, 0);
  REQUIRE(setup);
  const auto m = try_drop(c, layout, 0, 0);
  REQUIRE(m);

  const auto channels = channel::assemble_channels(setup->large_scale, setup->scheduled, c.n_antennas,
                                                   setup->small_scale_seed);
  const double rho = phy::dbm_to_w(c.ue_tx_power_dbm);
  const auto y = phy::received_pilots(channels, setup->assignment, rho,
                                      phy::noise_power_w(c.noise_psd_dbm_hz, c.bandwidth_hz, c.bs_noise_figure_db),
                                      setup->noise_seed);
  std::vector<phy::PrecoderSet> pre;
  for (int b = 0; b < 57; ++b)
    pre.push_back(phy::zf_precoder(phy::ls_estimate(y[b], setup->assignment.sequence[b], rho),
                                   phy::dbm_to_w(c.bs_tx_power_dbm)));
  const auto sinr =
      phy::dl_sinr(channels, pre, phy::noise_power_w(c.noise_psd_dbm_hz, c.bandwidth_hz, c.ue_noise_figure_db));
  const auto cont = phy::contamination_power(channels, srs::CollisionSets(setup->assignment), setup->assignment, rho);

  REQUIRE(sinr.size() == m->ues.size());
  for (std::size_t s = 0; s < sinr.size(); ++s) {
    CHECK(m->ues[s].sinr == Approx(sinr[s]).epsilon(1e-9));
    CHECK(m->ues[s].contamination_w == Approx(cont[s]).epsilon(1e-12));
    CHECK(m->ues[s].ue == channels.ue_ids[s]);
  }
}

TEST_CASE("reuse3 removes co-site pilot collisions in a full drop", "[engine]") {
  auto c = small_config(srs::Scheme::kReuse3);
  c.tau = 1;
  const auto layout = geometry::build_layout(c.isd_m);
  const auto s = prepare_drop(c, layout, 0, 0);
  REQUIRE(s);
  const srs::CollisionSets col(s->assignment);
  for (int b = 0; b < 57; ++b)
    for (int k = 0; k < c.n_k; ++k)
      for (const auto& x : col.of_slot(b, k)) CHECK(x.bs % 3 == b % 3);
}
