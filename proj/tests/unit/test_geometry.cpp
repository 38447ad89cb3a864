#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "pilotsim/geometry.hpp"

using namespace pilotsim;
using namespace pilotsim::geometry;
using Catch::Approx;

namespace {

double wrap_distance(const NetworkLayout& layout, int bs, const Point& p) {
  return wrap_displacement(layout, bs, p).norm();
}

}  // namespace

TEST_CASE("layout has 19 sites and 57 sectors", "[geometry]") {
  const auto layout = build_layout(500.0);
  REQUIRE(layout.n_sites() == 19);
  REQUIRE(layout.n_bs() == 57);
  REQUIRE(layout.wrap_vectors.size() == 7);
  CHECK(layout.wrap_vectors.front().norm() == 0.0);

  for (int b = 0; b < layout.n_bs(); ++b) {
    CHECK(layout.sectors[b].bs_index == b);
    CHECK(layout.sectors[b].site_index == b / 3);
    CHECK(layout.sectors[b].azimuth_deg == kSectorAzimuthsDeg[b % 3]);
  }
}

TEST_CASE("sites are at least one ISD apart and ring 1 sits at exactly one ISD", "[geometry]") {
  const auto layout = build_layout(500.0);
  double min_d = 1e300;
  for (int i = 0; i < 19; ++i)
    for (int j = i + 1; j < 19; ++j)
      min_d = std::min(min_d, (layout.site_positions[i] - layout.site_positions[j]).norm());
  CHECK(min_d == Approx(500.0).epsilon(1e-12));

  int ring1 = 0;
  for (int i = 1; i < 19; ++i)
    if (std::abs(layout.site_positions[i].norm() - 500.0) < 1e-6) ++ring1;
  CHECK(ring1 == 6);
}

TEST_CASE("wrap-around gives every site exactly six first-tier neighbours", "[geometry][wrap]") {
  const auto layout = build_layout(500.0);
  for (int s = 0; s < 19; ++s) {
    int first = 0, second = 0;
    for (int t = 0; t < 19; ++t) {
      if (t == s) continue;
      const double d = wrap_distance(layout, 3 * s, layout.site_positions[t]);
      if (std::abs(d - 500.0) < 1e-6) ++first;
      if (std::abs(d - 500.0 * std::sqrt(3.0)) < 1e-6) ++second;
      CHECK(d >= 500.0 - 1e-6);
    }
    INFO("site " << s);
    CHECK(first == 6);
    CHECK(second == 6);
  }
}

TEST_CASE("wrap images tile the plane without overlap", "[geometry][wrap]") {
  const auto layout = build_layout(500.0);
  // Shifted copies of every site never coincide with an original site.
  for (std::size_t w = 1; w < layout.wrap_vectors.size(); ++w) {
    CHECK(layout.wrap_vectors[w].norm() == Approx(500.0 * std::sqrt(19.0)).epsilon(1e-12));
    for (const auto& a : layout.site_positions)
      for (const auto& b : layout.site_positions) CHECK((a + layout.wrap_vectors[w] - b).norm() > 1.0);
  }
}

TEST_CASE("wrap distance between sites is symmetric", "[geometry][wrap]") {
  const auto layout = build_layout(500.0);
  // d(site i -> site j) == d(site j -> site i) under the wrap metric.
  for (int i = 0; i < 19; ++i)
    for (int j = 0; j < 19; ++j)
      CHECK(wrap_distance(layout, 3 * i, layout.site_positions[j]) ==
            Approx(wrap_distance(layout, 3 * j, layout.site_positions[i])).margin(1e-9));
}

TEST_CASE("UE drop respects the footprint and the minimum distance", "[geometry][drop]") {
  const auto layout = build_layout(500.0);
  const auto drop = drop_ues(layout, 5000, std::uint64_t{42});
  REQUIRE(drop.n_ue() == 5000);
  for (const auto& p : drop.positions) {
    CHECK(in_footprint(layout, p));
    for (int s = 0; s < 19; ++s) CHECK(wrap_distance(layout, 3 * s, p) >= 35.0);
  }
}

TEST_CASE("UE density is uniform over the site cells", "[geometry][drop]") {
  const auto layout = build_layout(500.0);
  constexpr int kN = 19000;
  const auto drop = drop_ues(layout, kN, std::uint64_t{7});
  std::vector<int> count(19, 0);
  for (const auto& p : drop.positions) ++count[site_cell(layout, p)];
  const double expected = kN / 19.0;
  double chi2 = 0.0;
  for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
  // 18 degrees of freedom, p = 0.001 critical value.
  CHECK(chi2 < 42.31);

  // Within one cell, the three 120-degree sectors receive a third each.
  std::array<int, 3> sector{};
  for (const auto& p : drop.positions) {
    const auto d = wrap_displacement(layout, 0, p);
    if (site_cell(layout, p) != 0) continue;
    const double az = std::atan2(d.y(), d.x()) * 180.0 / std::numbers::pi;
    const double rel = wrap_angle_deg(az - 90.0);  // sector edges at 90, 210, 330 degrees
    sector[rel < -120.0 ? 2 : rel < 0.0 ? 0 : rel < 120.0 ? 1 : 2]++;
  }
  const double third = (sector[0] + sector[1] + sector[2]) / 3.0;
  for (int s : sector) CHECK(std::abs(s - third) < 4.0 * std::sqrt(third));
}

TEST_CASE("UE drop is a pure function of the seed", "[geometry][drop]") {
  const auto layout = build_layout(500.0);
  const auto a = drop_ues(layout, 300, std::uint64_t{99});
  const auto b = drop_ues(layout, 300, std::uint64_t{99});
  const auto c = drop_ues(layout, 300, std::uint64_t{100});
  REQUIRE(a.positions.size() == b.positions.size());
  for (std::size_t i = 0; i < a.positions.size(); ++i) CHECK(a.positions[i] == b.positions[i]);
  CHECK(a.positions[0] != c.positions[0]);
}

TEST_CASE("site_cell finds the nearest site through the wrap", "[geometry][wrap]") {
  const auto layout = build_layout(500.0);
  for (int s = 0; s < 19; ++s) CHECK(site_cell(layout, layout.site_positions[s]) == s);
  // A point just beyond the outer ring maps back into the cluster.
  const Point outside = layout.site_positions[18] + layout.wrap_vectors[1];
  CHECK(site_cell(layout, outside) == 18);
}

TEST_CASE("invalid layouts are rejected", "[geometry]") {
  CHECK_THROWS_AS(build_layout(500.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(build_layout(0.0), std::invalid_argument);
  const auto layout = build_layout(500.0);
  CHECK_THROWS_AS(drop_ues(layout, 0, std::uint64_t{1}), std::invalid_argument);
  CHECK_THROWS_AS(drop_ues(layout, 10, std::uint64_t{1}, 250.0), std::invalid_argument);
}

TEST_CASE("sector antenna pattern", "[geometry][antenna]") {
  CHECK(sector_antenna_gain(0.0, 0.0) == Approx(8.0));
  CHECK(sector_antenna_gain(32.5, 0.0) == Approx(5.0));
  CHECK(sector_antenna_gain(0.0, 32.5) == Approx(5.0));
  CHECK(sector_antenna_gain(65.0, 0.0) == Approx(-4.0));
  // Front-to-back floor.
  CHECK(sector_antenna_gain(180.0, 0.0) == Approx(-22.0));
  CHECK(sector_antenna_gain(100.0, 100.0) == Approx(-22.0));
  CHECK(sector_antenna_gain(-40.0, 3.0) == Approx(sector_antenna_gain(40.0, -3.0)));
}

TEST_CASE("wrap_angle_deg maps into (-180, 180]", "[geometry]") {
  CHECK(wrap_angle_deg(180.0) == 180.0);
  CHECK(wrap_angle_deg(-180.0) == 180.0);
  CHECK(wrap_angle_deg(190.0) == Approx(-170.0));
  CHECK(wrap_angle_deg(-370.0) == Approx(-10.0));
  CHECK(wrap_angle_deg(720.0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("association picks the strongest BS, lowest index on ties", "[geometry][association]") {
  // 3 BSs x 4 UEs, BS-major.
  const std::vector<double> g = {
      -90, -80, -70, -60,   // bs 0
      -85, -80, -75, -100,  // bs 1
      -95, -79, -70, -60,   // bs 2
  };
  const auto a = associate_ues(3, 4, g);
  CHECK(a == std::vector<int>{1, 2, 0, 0});
  CHECK_THROWS_AS(associate_ues(3, 5, g), std::invalid_argument);
}

TEST_CASE("association is invariant to a common offset and to UE order", "[geometry][association]") {
  constexpr int kBs = 57, kUe = 40;
  Rng rng(5);
  std::uniform_real_distribution<double> u(-140.0, -60.0);
  std::vector<double> g(kBs * kUe);
  for (auto& x : g) x = u(rng);
  const auto base = associate_ues(kBs, kUe, g);

  auto shifted = g;
  for (auto& x : shifted) x += 17.25;
  CHECK(associate_ues(kBs, kUe, shifted) == base);

  std::vector<int> perm(kUe);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> permuted(g.size());
  for (int b = 0; b < kBs; ++b)
    for (int k = 0; k < kUe; ++k) permuted[b * kUe + k] = g[b * kUe + perm[k]];
  const auto pa = associate_ues(kBs, kUe, permuted);
  for (int k = 0; k < kUe; ++k) CHECK(pa[k] == base[perm[k]]);
}
