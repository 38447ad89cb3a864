#include <benchmark/benchmark.h>

#include "pilotsim/channel.hpp"
#include "pilotsim/engine.hpp"
#include "pilotsim/geometry.hpp"
#include "pilotsim/phy.hpp"

namespace {

using pilotsim::channel::CMatrix;

pilotsim::channel::LinkState typical_link() {
  pilotsim::channel::LinkState l;
  l.distance = 200.0;
  l.los = true;
  l.pathloss = 110.0;
  l.k_factor = 2.0;
  l.steering_angle = 20.0;
  return l;
}

void BM_SmallScale(benchmark::State& state) {
  const int n_antennas = static_cast<int>(state.range(0));
  const auto link = typical_link();
  pilotsim::Rng rng(1);
  pilotsim::channel::CVector h(n_antennas);
  for (auto _ : state) {
    pilotsim::channel::small_scale_into(link, h, rng);
    benchmark::DoNotOptimize(h.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SmallScale)->Arg(64)->Arg(128);

void BM_ZfPrecoder(benchmark::State& state) {
  const int n_antennas = static_cast<int>(state.range(0));
  const int n_k = static_cast<int>(state.range(1));
  pilotsim::Rng rng(2);
  const auto link = typical_link();
  CMatrix h(n_antennas, n_k);
  for (int k = 0; k < n_k; ++k) pilotsim::channel::small_scale_into(link, h.col(k), rng);
  for (auto _ : state) {
    auto w = pilotsim::phy::zf_precoder(h, 79.4);
    benchmark::DoNotOptimize(w.w.data());
  }
}
BENCHMARK(BM_ZfPrecoder)->Args({64, 16})->Args({128, 32})->Args({128, 44});

void BM_LargeScale(benchmark::State& state) {
  const auto layout = pilotsim::geometry::build_layout(500.0);
  const auto drop = pilotsim::geometry::drop_ues(layout, static_cast<int>(state.range(0)), 3);
  pilotsim::Rng rng(4);
  for (auto _ : state) {
    auto ls = pilotsim::channel::large_scale(layout, drop, rng);
    benchmark::DoNotOptimize(ls.n_ue());
  }
  state.SetItemsProcessed(state.iterations() * layout.n_bs() * state.range(0));
}
BENCHMARK(BM_LargeScale)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Drop(benchmark::State& state) {
  pilotsim::engine::SimConfig config;
  config.n_antennas = static_cast<int>(state.range(0));
  config.n_k = static_cast<int>(state.range(1));
  config.tau = 6;
  config.scheme = pilotsim::srs::Scheme::kFrNa;
  config.protected_ues_per_bs = config.n_k / 2;
  const auto layout = pilotsim::geometry::build_layout(config.isd_m);
  int drop = 0;
  for (auto _ : state) {
    auto m = pilotsim::engine::run_drop(config, layout, drop++, 10);
    benchmark::DoNotOptimize(m.bs_throughput.data());
  }
}
BENCHMARK(BM_Drop)->Args({64, 16})->Args({128, 32})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
