#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pilotsim/rng.hpp"

namespace pilotsim::geometry {

using Point = Eigen::Vector2d;

inline constexpr int kSectorsPerSite = 3;
inline constexpr std::array<double, kSectorsPerSite> kSectorAzimuthsDeg = {30.0, 150.0, 270.0};

struct Sector {
  int site_index = 0;
  double azimuth_deg = 0.0;  // counter-clockwise from the +x axis
  int bs_index = 0;
};

// Hexagonal multi-site deployment with wrap-around. BS index b is sector
// (b % 3) of site (b / 3).
struct NetworkLayout {
  std::vector<Point> site_positions;
  std::vector<Sector> sectors;
  double isd = 0.0;
  // Zero vector first, followed by the six cluster translations.
  std::vector<Point> wrap_vectors;

  int n_sites() const { return static_cast<int>(site_positions.size()); }
  int n_bs() const { return static_cast<int>(sectors.size()); }
  const Point& bs_position(int bs) const {
    return site_positions[static_cast<std::size_t>(sectors[static_cast<std::size_t>(bs)].site_index)];
  }
};

struct UeDrop {
  std::vector<Point> positions;
  std::vector<int> association;  // UE index -> BS index; empty until associate_ues
  double height = 1.5;

  int n_ue() const { return static_cast<int>(positions.size()); }
};

/// Builds the 19-site tri-sector cluster with inter-site distance `isd`.
/// Throws std::invalid_argument for any other site count or a non-positive isd.
NetworkLayout build_layout(double isd, int n_sites = 19);

/// Drops `n_ue` UEs uniformly over the union of the site hexagons, keeping at
/// least `min_distance` metres from every site (resampling otherwise).
UeDrop drop_ues(const NetworkLayout& layout, int n_ue, std::uint64_t rng_seed,
                double min_distance = 35.0);

/// Same as above, drawing from a caller-owned engine.
UeDrop drop_ues(const NetworkLayout& layout, int n_ue, Rng& rng, double min_distance = 35.0);

/// Displacement from the closest wrap image of `bs` to the UE.
Point wrap_displacement(const NetworkLayout& layout, int bs, const Point& ue_position);

/// Index of the hexagonal site cell containing `p` under the wrap metric.
int site_cell(const NetworkLayout& layout, const Point& p);

/// Whether `p` lies inside the cluster footprint (union of site hexagons).
bool in_footprint(const NetworkLayout& layout, const Point& p);

/// Parabolic sector element pattern, boresight gain included (dBi).
/// Both angles are in degrees, measured from the (downtilted) boresight.
double sector_antenna_gain(double horizontal_angle_deg, double vertical_angle_deg);

/// Wraps an angle in degrees into (-180, 180].
double wrap_angle_deg(double deg);

/// Serving BS of every UE: argmax over BSs of the large-scale gain, ties to the
/// lowest BS index. `gain_db` is laid out as gain_db[bs * n_ue + ue].
std::vector<int> associate_ues(int n_bs, int n_ue, std::span<const double> gain_db);

}  // namespace pilotsim::geometry
