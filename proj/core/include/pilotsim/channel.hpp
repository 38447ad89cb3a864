#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pilotsim/geometry.hpp"
#include "pilotsim/rng.hpp"

namespace pilotsim::channel {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct PropagationParams {
  double carrier_ghz = 2.0;
  double bs_height = 25.0;
  double ue_height = 1.5;
  double downtilt_deg = 12.0;
  double shadowing_std_los_db = 4.0;
  double shadowing_std_nlos_db = 6.0;
};

// Large-scale state of one BS-UE link, frozen for the duration of a drop.
struct LinkState {
  double distance = 0.0;      // 2-D, wrap metric (m)
  bool los = false;
  double pathloss = 0.0;      // dB
  double shadowing = 0.0;     // dB
  double antenna_gain = 0.0;  // dBi
  double k_factor = 0.0;      // linear; 0 for NLOS
  double steering_angle = 0.0;  // degrees from sector boresight

  // -pathloss - shadowing + antenna gain
  double gain_db() const { return -pathloss - shadowing + antenna_gain; }
};

/// P(LOS) of the 3GPP UMa model. Requires d > 0.
double los_probability(double d);

/// 3GPP UMa pathloss in dB for 10 m <= d <= 5000 m; throws std::out_of_range otherwise.
/// NLOS is clamped from below by the LOS value.
double pathloss_uma(double d, double fc_ghz, bool los, double bs_height = 25.0, double ue_height = 1.5);

/// LOS breakpoint distance d'_BP (m) using effective antenna heights.
double breakpoint_distance(double fc_ghz, double bs_height, double ue_height);

/// Zero-mean log-normal shadowing sample in dB.
double sample_shadowing(bool los, Rng& rng, const PropagationParams& params = {});

/// Distance-dependent Ricean K factor (dB) for LOS links.
double ricean_k(double d);

/// Half-wavelength ULA steering vector (unit-modulus entries).
CVector steering_vector(double angle_deg, int n_antennas);

/// Draws LOS state, shadowing and geometry-derived quantities for one link.
LinkState make_link(const geometry::NetworkLayout& layout, int bs, const geometry::Point& ue,
                    Rng& rng, const PropagationParams& params = {});

/// Ricean small-scale realization scaled by the link's large-scale gain.
CVector small_scale(const LinkState& link, int n_antennas, Rng& rng);

/// Writes the realization into `out` (length n_antennas) without allocating.
void small_scale_into(const LinkState& link, Eigen::Ref<CVector> out, Rng& rng);

// Large-scale state of every (BS, UE) pair of a drop, BS-major.
class LargeScaleMap {
 public:
  LargeScaleMap() = default;
  LargeScaleMap(int n_bs, int n_ue) : n_bs_(n_bs), n_ue_(n_ue), links_(static_cast<std::size_t>(n_bs) * n_ue) {}

  int n_bs() const { return n_bs_; }
  int n_ue() const { return n_ue_; }
  LinkState& at(int bs, int ue) { return links_[static_cast<std::size_t>(bs) * n_ue_ + ue]; }
  const LinkState& at(int bs, int ue) const { return links_[static_cast<std::size_t>(bs) * n_ue_ + ue]; }

  /// gain_db() of every link, BS-major (the layout associate_ues expects).
  std::vector<double> gain_table() const;

 private:
  int n_bs_ = 0;
  int n_ue_ = 0;
  std::vector<LinkState> links_;
};

/// Draws the large-scale state of every link in BS-major order.
LargeScaleMap large_scale(const geometry::NetworkLayout& layout, const geometry::UeDrop& drop, Rng& rng,
                          const PropagationParams& params = {});

// Small-scale channels of every BS towards every scheduled UE. The scheduled
// UEs are flattened BS by BS; column s of `at_bs[b]` is the channel from
// scheduled UE s to BS b (same vector serves UL training and DL data).
struct ChannelSet {
  std::vector<int> ue_ids;       // flattened scheduled UE ids
  std::vector<int> serving_bs;   // serving BS of each flattened UE
  std::vector<CMatrix> at_bs;    // n_bs matrices of N_A x ue_ids.size()

  int n_scheduled() const { return static_cast<int>(ue_ids.size()); }
  int n_bs() const { return static_cast<int>(at_bs.size()); }
  auto channel(int bs, int s) const { return at_bs[static_cast<std::size_t>(bs)].col(s); }
};

/// Channels from every scheduled UE to BS `bs`, drawn from `rng` in column order.
CMatrix bs_channels(const LargeScaleMap& ls, int bs, std::span<const int> ue_ids, int n_antennas, Rng& rng);

/// Channels for every (BS, scheduled UE) pair. BS b draws from substream
/// (seed, b) so any BS can be regenerated on its own.
ChannelSet assemble_channels(const LargeScaleMap& ls, const std::vector<std::vector<int>>& scheduled,
                             int n_antennas, std::uint64_t seed);

}  // namespace pilotsim::channel
