#include "pilotsim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <boost/random/normal_distribution.hpp>

namespace pilotsim::phy {
namespace {

std::vector<int> offsets_of(const srs::SrsAssignment& assignment) {
  std::vector<int> off(static_cast<std::size_t>(assignment.n_bs()) + 1, 0);
  for (int b = 0; b < assignment.n_bs(); ++b)
    off[b + 1] = off[b] + static_cast<int>(assignment.sequence[b].size());
  return off;
}

}  // namespace

CMatrix received_pilots_at(const CMatrix& h_at_bs, std::span<const int> sequence, int n_sequences, double rho,
                           double noise_var, Rng& rng) {
  if (static_cast<std::size_t>(h_at_bs.cols()) != sequence.size())
    throw std::invalid_argument("received_pilots: one pilot index per channel column required");

  const double amp = std::sqrt(rho);
  CMatrix y = CMatrix::Zero(h_at_bs.rows(), n_sequences);
  for (std::size_t s = 0; s < sequence.size(); ++s) {
    if (sequence[s] < 0 || sequence[s] >= n_sequences)
      throw std::out_of_range("received_pilots: pilot index out of range");
    y.col(sequence[s]) += amp * h_at_bs.col(static_cast<Eigen::Index>(s));
  }
  if (noise_var > 0.0) {
    boost::random::normal_distribution<double> n(0.0, std::sqrt(noise_var / 2.0));
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const double re = n(rng);
        const double im = n(rng);
        y(r, c) += Complex(re, im);
      }
  }
  return y;
}

std::vector<int> flatten_sequences(const srs::SrsAssignment& assignment) {
  std::vector<int> flat;
  for (const auto& seqs : assignment.sequence) flat.insert(flat.end(), seqs.begin(), seqs.end());
  return flat;
}

std::vector<CMatrix> received_pilots(const channel::ChannelSet& channels, const srs::SrsAssignment& assignment,
                                     double rho, double noise_var, std::uint64_t noise_seed) {
  const auto flat = flatten_sequences(assignment);
  if (static_cast<int>(flat.size()) != channels.n_scheduled())
    throw std::invalid_argument("received_pilots: assignment does not match the channel set");
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(channels.n_bs()));
  for (int b = 0; b < channels.n_bs(); ++b) {
    Rng rng = make_rng(noise_seed, {static_cast<std::uint64_t>(b)});
    out.push_back(received_pilots_at(channels.at_bs[b], flat, assignment.n_sequences, rho, noise_var, rng));
  }
  return out;
}

CMatrix ls_estimate(const CMatrix& observation, std::span<const int> own_sequences, double rho) {
  // Y Phi^H with Phi the canonical basis rows of the own pilots: a column pick.
  const double inv = 1.0 / std::sqrt(rho);
  CMatrix est(observation.rows(), static_cast<Eigen::Index>(own_sequences.size()));
  for (std::size_t k = 0; k < own_sequences.size(); ++k) {
    if (own_sequences[k] < 0 || own_sequences[k] >= observation.cols())
      throw std::out_of_range("ls_estimate: pilot index out of range");
    est.col(static_cast<Eigen::Index>(k)) = inv * observation.col(own_sequences[k]);
  }
  return est;
}

std::vector<double> contamination_at(const CMatrix& h_at_bs, int bs, const srs::CollisionSets& collisions,
                                     const srs::SrsAssignment& assignment, std::span<const int> bs_offset,
                                     double rho) {
  const auto& own = assignment.sequence.at(static_cast<std::size_t>(bs));
  const double n_antennas = static_cast<double>(h_at_bs.rows());
  std::vector<double> c(own.size(), 0.0);
  for (std::size_t k = 0; k < own.size(); ++k) {
    double sum = 0.0;
    for (const auto& col : collisions.at(bs, own[k]))
      sum += h_at_bs.col(bs_offset[col.bs] + col.slot).squaredNorm();
    c[k] = rho * sum / n_antennas;
  }
  return c;
}

std::vector<double> contamination_power(const channel::ChannelSet& channels, const srs::CollisionSets& collisions,
                                        const srs::SrsAssignment& assignment, double rho) {
  const auto off = offsets_of(assignment);
  std::vector<double> out(static_cast<std::size_t>(channels.n_scheduled()), 0.0);
  for (int b = 0; b < assignment.n_bs(); ++b) {
    const auto c = contamination_at(channels.at_bs[b], b, collisions, assignment, off, rho);
    std::copy(c.begin(), c.end(), out.begin() + off[b]);
  }
  return out;
}

double contamination_dbm(double watts) {
  if (!(watts > 0.0)) return kContaminationFloorDbm;
  return std::max(10.0 * std::log10(watts) + 30.0, kContaminationFloorDbm);
}

PrecoderSet zf_precoder(const CMatrix& estimate, double p_bs, int bs) {
  const Eigen::Index n_a = estimate.rows();
  const Eigen::Index n_k = estimate.cols();
  if (n_k == 0) return {CMatrix(n_a, 0), p_bs};
  if (n_k > n_a) throw IllConditionedChannel(bs, std::numeric_limits<double>::infinity());

  // Column scaling of H only rescales the columns of H (H^H H)^-1, and the
  // columns are renormalized below, so work on unit-norm columns.
  CMatrix hn = estimate;
  for (Eigen::Index k = 0; k < n_k; ++k) {
    const double norm = hn.col(k).norm();
    if (!(norm > 0.0)) throw IllConditionedChannel(bs, std::numeric_limits<double>::infinity());
    hn.col(k) /= norm;
  }

  const CMatrix gram = hn.adjoint() * hn;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxGramCondition)) throw IllConditionedChannel(bs, cond);

  // H = Q R  =>  H (H^H H)^-1 = Q R^-H.
  Eigen::HouseholderQR<CMatrix> qr(hn);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(n_a, n_k);
  const auto r = qr.matrixQR().topLeftCorner(n_k, n_k).triangularView<Eigen::Upper>();
  // Solve W R^H = Q for W: transpose to R W^H = Q^H.
  CMatrix w = r.solve(q.adjoint()).adjoint();

  const double target = std::sqrt(p_bs / static_cast<double>(n_k));
  for (Eigen::Index k = 0; k < n_k; ++k) w.col(k) *= target / w.col(k).norm();
  return {std::move(w), p_bs};
}

SinrAccumulator::SinrAccumulator(std::vector<int> serving_bs, std::vector<int> bs_offset)
    : serving_bs_(std::move(serving_bs)),
      bs_offset_(std::move(bs_offset)),
      desired_(serving_bs_.size(), 0.0),
      interference_(serving_bs_.size(), 0.0) {}

void SinrAccumulator::add_bs(int bs, const CMatrix& h_at_bs, const PrecoderSet& precoder) {
  if (h_at_bs.cols() != static_cast<Eigen::Index>(serving_bs_.size()))
    throw std::invalid_argument("SinrAccumulator: channel matrix must cover every scheduled UE");
  // gain(s, k) = h_s^H w_k
  const CMatrix gain = h_at_bs.adjoint() * precoder.w;
  const int first = bs_offset_[static_cast<std::size_t>(bs)];
  for (Eigen::Index s = 0; s < gain.rows(); ++s) {
    const auto row = gain.row(s);
    if (serving_bs_[static_cast<std::size_t>(s)] == bs) {
      const Eigen::Index own = s - first;
      double other = 0.0;
      for (Eigen::Index k = 0; k < row.size(); ++k)
        if (k != own) other += std::norm(row[k]);
      desired_[s] = std::norm(row[own]);
      interference_[s] += other;
    } else {
      interference_[s] += row.squaredNorm();
    }
  }
}

std::vector<double> SinrAccumulator::sinr(double noise_var_ue) const {
  std::vector<double> out(desired_.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = desired_[s] / (interference_[s] + noise_var_ue);
  return out;
}

std::vector<double> dl_sinr(const channel::ChannelSet& channels, const std::vector<PrecoderSet>& precoders,
                            double noise_var_ue) {
  if (static_cast<int>(precoders.size()) != channels.n_bs())
    throw std::invalid_argument("dl_sinr: one precoder set per BS required");
  std::vector<int> off(precoders.size() + 1, 0);
  for (std::size_t b = 0; b < precoders.size(); ++b) off[b + 1] = off[b] + static_cast<int>(precoders[b].w.cols());
  if (off.back() != channels.n_scheduled())
    throw std::invalid_argument("dl_sinr: precoders do not match the scheduled UEs");
  for (int s = 0; s < channels.n_scheduled(); ++s) {
    const int b = channels.serving_bs[s];
    if (s < off[b] || s >= off[b + 1]) throw std::invalid_argument("dl_sinr: UEs must be flattened BS by BS");
  }

  SinrAccumulator acc(channels.serving_bs, off);
  for (int b = 0; b < channels.n_bs(); ++b) acc.add_bs(b, channels.at_bs[b], precoders[b]);
  return acc.sinr(noise_var_ue);
}

double bs_throughput(std::span<const double> sinrs, int tau, int t_total, double bandwidth_hz) {
  if (tau < 0 || tau > t_total) throw std::invalid_argument("bs_throughput: tau outside [0, T]");
  double rate = 0.0;
  for (double g : sinrs) rate += bandwidth_hz * std::log2(1.0 + g);
  return (1.0 - static_cast<double>(tau) / t_total) * rate;
}

double noise_power_w(double psd_dbm_hz, double bandwidth_hz, double noise_figure_db) {
  return dbm_to_w(psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

}  // namespace pilotsim::phy
