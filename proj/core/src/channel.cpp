#include "pilotsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace pilotsim::channel {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double los_probability(double d) {
  if (!(d > 0.0)) throw std::invalid_argument("los_probability: distance must be positive");
  const double e = std::exp(-d / 63.0);
  return std::min(18.0 / d, 1.0) * (1.0 - e) + e;
}

double breakpoint_distance(double fc_ghz, double bs_height, double ue_height) {
  return 4.0 * (bs_height - 1.0) * (ue_height - 1.0) * fc_ghz * 1e9 / kSpeedOfLight;
}

double pathloss_uma(double d, double fc_ghz, bool los, double bs_height, double ue_height) {
  if (d < 10.0 || d > 5000.0)
    throw std::out_of_range("pathloss_uma: distance " + std::to_string(d) + " m outside [10, 5000] m");

  const double log_fc = std::log10(fc_ghz);
  const double d_bp = breakpoint_distance(fc_ghz, bs_height, ue_height);
  double pl_los;
  if (d < d_bp) {
    pl_los = 22.0 * std::log10(d) + 28.0 + 20.0 * log_fc;
  } else {
    pl_los = 40.0 * std::log10(d) + 7.8 - 18.0 * std::log10(bs_height - 1.0) -
             18.0 * std::log10(ue_height - 1.0) + 2.0 * log_fc;
  }
  if (los) return pl_los;

  // Street width 20 m, average building height 20 m.
  constexpr double kStreetWidth = 20.0;
  constexpr double kBuildingHeight = 20.0;
  const double hb = bs_height;
  const double log_ut = std::log10(11.75 * ue_height);
  const double pl_nlos = 161.04 - 7.1 * std::log10(kStreetWidth) + 7.5 * std::log10(kBuildingHeight) -
                         (24.37 - 3.7 * (kBuildingHeight / hb) * (kBuildingHeight / hb)) * std::log10(hb) +
                         (43.42 - 3.1 * std::log10(hb)) * (std::log10(d) - 3.0) + 20.0 * log_fc -
                         (3.2 * log_ut * log_ut - 4.97);
  return std::max(pl_nlos, pl_los);
}

double sample_shadowing(bool los, Rng& rng, const PropagationParams& params) {
  boost::random::normal_distribution<double> n(0.0, los ? params.shadowing_std_los_db
                                                        : params.shadowing_std_nlos_db);
  return n(rng);
}

double ricean_k(double d) {
  if (!(d > 0.0)) throw std::invalid_argument("ricean_k: distance must be positive");
  return 13.0 - 0.03 * d;
}

CVector steering_vector(double angle_deg, int n_antennas) {
  CVector a(n_antennas);
  const double phase = kPi * std::sin(angle_deg * kPi / 180.0);
  for (int n = 0; n < n_antennas; ++n) a[n] = std::polar(1.0, phase * n);
  return a;
}

LinkState make_link(const geometry::NetworkLayout& layout, int bs, const geometry::Point& ue, Rng& rng,
                    const PropagationParams& params) {
  const geometry::Point disp = geometry::wrap_displacement(layout, bs, ue);
  LinkState link;
  link.distance = disp.norm();

  const double azimuth = std::atan2(disp.y(), disp.x()) * 180.0 / kPi;
  link.steering_angle = geometry::wrap_angle_deg(azimuth - layout.sectors[bs].azimuth_deg);
  const double elevation_down =
      std::atan2(params.bs_height - params.ue_height, link.distance) * 180.0 / kPi;
  link.antenna_gain = geometry::sector_antenna_gain(link.steering_angle, elevation_down - params.downtilt_deg);

  boost::random::bernoulli_distribution<double> los(los_probability(link.distance));
  link.los = los(rng);
  link.pathloss = pathloss_uma(link.distance, params.carrier_ghz, link.los, params.bs_height, params.ue_height);
  link.shadowing = sample_shadowing(link.los, rng, params);
  link.k_factor = link.los ? db_to_linear(ricean_k(link.distance)) : 0.0;
  return link;
}

void small_scale_into(const LinkState& link, Eigen::Ref<CVector> out, Rng& rng) {
  const int n_antennas = static_cast<int>(out.size());
  const double g = std::sqrt(db_to_linear(link.gain_db()));
  const double k = link.k_factor;
  const double diffuse = g * std::sqrt(1.0 / (k + 1.0));

  boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (int n = 0; n < n_antennas; ++n) {
    const double re = normal(rng);
    const double im = normal(rng);
    out[n] = Complex(diffuse * re, diffuse * im);
  }
  if (k > 0.0) {
    boost::random::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const double specular = g * std::sqrt(k / (k + 1.0));
    const double psi = phase(rng);
    const double step = kPi * std::sin(link.steering_angle * kPi / 180.0);
    for (int n = 0; n < n_antennas; ++n) out[n] += std::polar(specular, psi + step * n);
  }
}

CVector small_scale(const LinkState& link, int n_antennas, Rng& rng) {
  if (n_antennas < 1) throw std::invalid_argument("small_scale: need at least one antenna");
  CVector h(n_antennas);
  small_scale_into(link, h, rng);
  return h;
}

std::vector<double> LargeScaleMap::gain_table() const {
  std::vector<double> g(links_.size());
  std::transform(links_.begin(), links_.end(), g.begin(), [](const LinkState& l) { return l.gain_db(); });
  return g;
}

LargeScaleMap large_scale(const geometry::NetworkLayout& layout, const geometry::UeDrop& drop, Rng& rng,
                          const PropagationParams& params) {
  LargeScaleMap map(layout.n_bs(), drop.n_ue());
  for (int b = 0; b < layout.n_bs(); ++b)
    for (int u = 0; u < drop.n_ue(); ++u) map.at(b, u) = make_link(layout, b, drop.positions[u], rng, params);
  return map;
}

CMatrix bs_channels(const LargeScaleMap& ls, int bs, std::span<const int> ue_ids, int n_antennas, Rng& rng) {
  CMatrix h(n_antennas, static_cast<Eigen::Index>(ue_ids.size()));
  for (std::size_t s = 0; s < ue_ids.size(); ++s)
    small_scale_into(ls.at(bs, ue_ids[s]), h.col(static_cast<Eigen::Index>(s)), rng);
  return h;
}

ChannelSet assemble_channels(const LargeScaleMap& ls, const std::vector<std::vector<int>>& scheduled,
                             int n_antennas, std::uint64_t seed) {
  ChannelSet set;
  for (std::size_t b = 0; b < scheduled.size(); ++b) {
    for (int ue : scheduled[b]) {
      set.ue_ids.push_back(ue);
      set.serving_bs.push_back(static_cast<int>(b));
    }
  }
  set.at_bs.reserve(static_cast<std::size_t>(ls.n_bs()));
  for (int b = 0; b < ls.n_bs(); ++b) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(b)});
    set.at_bs.push_back(bs_channels(ls, b, set.ue_ids, n_antennas, rng));
  }
  return set;
}

}  // namespace pilotsim::channel
