#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "pilotsim/channel.hpp"
#include "pilotsim/rng.hpp"
#include "pilotsim/srs_alloc.hpp"

namespace pilotsim::phy {

using channel::CMatrix;
using channel::Complex;
using channel::CVector;

// Floor substituted for zero contamination when reporting in dBm.
inline constexpr double kContaminationFloorDbm = -250.0;

// Thrown by zf_precoder when the estimate Gram matrix is numerically singular.
class IllConditionedChannel : public std::runtime_error {
 public:
  IllConditionedChannel(int bs, double condition)
      : std::runtime_error("zf_precoder: estimate Gram matrix is ill-conditioned"), bs_(bs), condition_(condition) {}
  int bs() const { return bs_; }
  double condition() const { return condition_; }

 private:
  int bs_;
  double condition_;
};

/// Received pilot block Y_b (N_A x n_sequences) at one BS. `h_at_bs` holds the
/// channel of every network-wide scheduled UE to this BS (one column each) and
/// `sequence` the pilot index of every such UE. Noise is skipped when
/// noise_var == 0.
CMatrix received_pilots_at(const CMatrix& h_at_bs, std::span<const int> sequence, int n_sequences, double rho,
                           double noise_var, Rng& rng);

/// Pilot index of every scheduled UE, flattened BS by BS.
std::vector<int> flatten_sequences(const srs::SrsAssignment& assignment);

/// Y_b for every BS. BS b draws its noise from substream (noise_seed, b).
std::vector<CMatrix> received_pilots(const channel::ChannelSet& channels, const srs::SrsAssignment& assignment,
                                     double rho, double noise_var, std::uint64_t noise_seed);

/// LS estimate: column k is (1 / sqrt(rho)) times column own_sequences[k] of Y_b.
CMatrix ls_estimate(const CMatrix& observation, std::span<const int> own_sequences, double rho);

/// Per-UE pilot contamination (W): rho times the per-antenna average channel
/// power of the other-cell UEs sharing the UE's pilot, measured at its serving
/// BS. Result indexed like channels.ue_ids.
std::vector<double> contamination_power(const channel::ChannelSet& channels, const srs::CollisionSets& collisions,
                                        const srs::SrsAssignment& assignment, double rho);

/// Contamination of the UEs served by `bs`, given that BS's channel matrix
/// (flattened columns) and the column offset of each BS's first scheduled UE.
std::vector<double> contamination_at(const CMatrix& h_at_bs, int bs, const srs::CollisionSets& collisions,
                                     const srs::SrsAssignment& assignment, std::span<const int> bs_offset,
                                     double rho);

/// Converts contamination in watts to dBm, substituting the floor for zero.
double contamination_dbm(double watts);

// ZF precoders of one BS; column k serves the k-th scheduled UE.
struct PrecoderSet {
  CMatrix w;
  double p_bs = 0.0;
};

/// Maximum condition number of the estimate Gram matrix accepted by zf_precoder.
inline constexpr double kMaxGramCondition = 1e12;

/// W = H (H^H H)^-1 with every column rescaled to squared norm p_bs / N_K.
/// Throws IllConditionedChannel when N_K > N_A or cond(H^H H) > 1e12.
PrecoderSet zf_precoder(const CMatrix& estimate, double p_bs, int bs = -1);

/// DL SINR of every flattened scheduled UE, excluding the desired stream from
/// the interference sum. `precoders[b]` must serve the UEs of BS b in
/// flattened order.
std::vector<double> dl_sinr(const channel::ChannelSet& channels, const std::vector<PrecoderSet>& precoders,
                            double noise_var_ue);

// Running accumulator for dl_sinr that takes one BS at a time, so that the
// full channel set never has to be held in memory.
class SinrAccumulator {
 public:
  SinrAccumulator(std::vector<int> serving_bs, std::vector<int> bs_offset);

  /// Adds the DL streams of BS `bs`, given its channel to every scheduled UE.
  void add_bs(int bs, const CMatrix& h_at_bs, const PrecoderSet& precoder);

  std::vector<double> sinr(double noise_var_ue) const;

 private:
  std::vector<int> serving_bs_;
  std::vector<int> bs_offset_;
  std::vector<double> desired_;
  std::vector<double> interference_;
};

/// (1 - tau / T) * sum_k B log2(1 + sinr_k), in bit/s.
double bs_throughput(std::span<const double> sinrs, int tau, int t_total, double bandwidth_hz);

/// Thermal noise power (W) over `bandwidth_hz` with the given noise figure.
double noise_power_w(double psd_dbm_hz, double bandwidth_hz, double noise_figure_db);

inline double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace pilotsim::phy
