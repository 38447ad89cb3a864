#include "pilotsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace pilotsim::geometry {
namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

// Axial hex coordinates (q, r) to the plane; unit vectors 60 degrees apart.
Point axial_to_plane(int q, int r, double isd) {
  return {isd * (q + 0.5 * r), isd * (0.5 * kSqrt3 * r)};
}

// Site hexagon: edges perpendicular to the three lattice directions at isd / 2.
bool in_site_hexagon(const Point& offset, double isd) {
  const double half = 0.5 * isd + 1e-9 * isd;
  const double a = std::abs(offset.x());
  const double b = std::abs(0.5 * offset.x() + 0.5 * kSqrt3 * offset.y());
  const double c = std::abs(-0.5 * offset.x() + 0.5 * kSqrt3 * offset.y());
  return a <= half && b <= half && c <= half;
}

double wrap_distance_to_site(const NetworkLayout& layout, int site, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  const Point& s = layout.site_positions[static_cast<std::size_t>(site)];
  for (const auto& v : layout.wrap_vectors) best = std::min(best, (p - (s + v)).norm());
  return best;
}

}  // namespace

NetworkLayout build_layout(double isd, int n_sites) {
  if (!(isd > 0.0)) throw std::invalid_argument("build_layout: isd must be positive");
  if (n_sites != 19) {
    throw std::invalid_argument("build_layout: only the 19-site wrap-around cluster is supported, got " +
                                std::to_string(n_sites) + " sites");
  }

  NetworkLayout layout;
  layout.isd = isd;

  // Hexagonal cluster of radius 2: center, 6 sites on ring 1, 12 on ring 2.
  layout.site_positions.push_back(axial_to_plane(0, 0, isd));
  for (int ring = 1; ring <= 2; ++ring) {
    for (int q = -ring; q <= ring; ++q) {
      for (int r = -ring; r <= ring; ++r) {
        const int s = -q - r;
        if (std::max({std::abs(q), std::abs(r), std::abs(s)}) == ring)
          layout.site_positions.push_back(axial_to_plane(q, r, isd));
      }
    }
  }

  for (int site = 0; site < n_sites; ++site) {
    for (int k = 0; k < kSectorsPerSite; ++k) {
      layout.sectors.push_back({site, kSectorAzimuthsDeg[static_cast<std::size_t>(k)],
                                site * kSectorsPerSite + k});
    }
  }

  // The 19-site cluster tiles the plane with shift (3, 2) in axial coordinates
  // (19 = 3^2 + 3*2 + 2^2); the other five images are its 60-degree rotations.
  layout.wrap_vectors.push_back(Point::Zero());
  int q = 3, r = 2;
  for (int k = 0; k < 6; ++k) {
    layout.wrap_vectors.push_back(axial_to_plane(q, r, isd));
    const int nq = -r;
    const int nr = q + r;
    q = nq;
    r = nr;
  }
  return layout;
}

UeDrop drop_ues(const NetworkLayout& layout, int n_ue, std::uint64_t rng_seed, double min_distance) {
  Rng rng(rng_seed);
  return drop_ues(layout, n_ue, rng, min_distance);
}

UeDrop drop_ues(const NetworkLayout& layout, int n_ue, Rng& rng, double min_distance) {
  if (n_ue <= 0) throw std::invalid_argument("drop_ues: n_ue must be positive");
  if (min_distance >= 0.5 * layout.isd)
    throw std::invalid_argument("drop_ues: min_distance must be below isd / 2");

  boost::random::uniform_int_distribution<int> pick_site(0, layout.n_sites() - 1);
  boost::random::uniform_real_distribution<double> ux(-0.5 * layout.isd, 0.5 * layout.isd);
  boost::random::uniform_real_distribution<double> uy(-layout.isd / kSqrt3, layout.isd / kSqrt3);

  UeDrop drop;
  drop.positions.reserve(static_cast<std::size_t>(n_ue));
  while (drop.n_ue() < n_ue) {
    // Every site hexagon has the same area, so a uniform site followed by a
    // uniform point inside its hexagon is uniform over the footprint.
    const int site = pick_site(rng);
    Point offset;
    do {
      offset = {ux(rng), uy(rng)};
    } while (!in_site_hexagon(offset, layout.isd));
    const Point p = layout.site_positions[static_cast<std::size_t>(site)] + offset;

    bool too_close = false;
    for (int s = 0; s < layout.n_sites() && !too_close; ++s)
      too_close = wrap_distance_to_site(layout, s, p) < min_distance;
    if (!too_close) drop.positions.push_back(p);
  }
  return drop;
}

Point wrap_displacement(const NetworkLayout& layout, int bs, const Point& ue_position) {
  const Point& s = layout.bs_position(bs);
  Point best = ue_position - s;
  double best_d2 = best.squaredNorm();
  for (std::size_t i = 1; i < layout.wrap_vectors.size(); ++i) {
    const Point d = ue_position - (s + layout.wrap_vectors[i]);
    const double d2 = d.squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = d;
    }
  }
  return best;
}

int site_cell(const NetworkLayout& layout, const Point& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int s = 0; s < layout.n_sites(); ++s) {
    const double d = wrap_distance_to_site(layout, s, p);
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

bool in_footprint(const NetworkLayout& layout, const Point& p) {
  for (const auto& s : layout.site_positions)
    if (in_site_hexagon(p - s, layout.isd)) return true;
  return false;
}

double wrap_angle_deg(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double sector_antenna_gain(double horizontal_angle_deg, double vertical_angle_deg) {
  constexpr double kHpbw = 65.0;
  constexpr double kFloor = 30.0;
  constexpr double kMaxGain = 8.0;
  const double h = horizontal_angle_deg / kHpbw;
  const double v = vertical_angle_deg / kHpbw;
  const double a_h = -std::min(12.0 * h * h, kFloor);
  const double a_v = -std::min(12.0 * v * v, kFloor);
  return -std::min(-(a_h + a_v), kFloor) + kMaxGain;
}

std::vector<int> associate_ues(int n_bs, int n_ue, std::span<const double> gain_db) {
  if (gain_db.size() != static_cast<std::size_t>(n_bs) * static_cast<std::size_t>(n_ue))
    throw std::invalid_argument("associate_ues: gain table does not cover every (bs, ue) pair");
  std::vector<int> serving(static_cast<std::size_t>(n_ue), 0);
  std::vector<double> best(static_cast<std::size_t>(n_ue), -std::numeric_limits<double>::infinity());
  for (int b = 0; b < n_bs; ++b) {
    const double* row = gain_db.data() + static_cast<std::size_t>(b) * static_cast<std::size_t>(n_ue);
    for (int u = 0; u < n_ue; ++u) {
      // Strict comparison keeps the lowest BS index on ties.
      if (row[u] > best[static_cast<std::size_t>(u)]) {
        best[static_cast<std::size_t>(u)] = row[u];
        serving[static_cast<std::size_t>(u)] = b;
      }
    }
  }
  return serving;
}

}  // namespace pilotsim::geometry
