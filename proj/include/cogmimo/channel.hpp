// SPDX-License-Identifier: Apache-2.0
//
// Gaussian vector interference channel: y_q = H_qq x_q + sum_{r!=q} H_rq x_r + n_q.
// Users are 0-based throughout. link(r, q) is the matrix from transmitter r to
// receiver q, of size rx_dim(q) x tx_dim(r).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogmimo/linalg.hpp"

namespace cogmimo {

/// Upper bound on the condition number accepted for a direct channel H_qq.
inline constexpr double kMaxDirectCondition = 1e12;

class ChannelSet {
 public:
  ChannelSet() = default;

  /// links[r][q] = H_rq, noise[q] = R_nq. Validates every invariant and throws
  /// InvalidChannel / DimensionMismatch on violation.
  ChannelSet(std::vector<std::vector<CMatrix>> links, std::vector<CMatrix> noise,
             std::optional<std::vector<std::vector<double>>> distances = std::nullopt);

  std::size_t user_count() const noexcept { return noise_.size(); }
  const CMatrix& link(std::size_t r, std::size_t q) const { return links_.at(r).at(q); }
  const CMatrix& direct(std::size_t q) const { return link(q, q); }
  const CMatrix& noise(std::size_t q) const { return noise_.at(q); }
  Eigen::Index tx_dim(std::size_t q) const { return direct(q).cols(); }
  Eigen::Index rx_dim(std::size_t q) const { return direct(q).rows(); }
  const std::optional<std::vector<std::vector<double>>>& distances() const noexcept {
    return distances_;
  }

  /// Copy with every cross channel (r != q) multiplied by c.
  ChannelSet with_scaled_cross(Complex c) const;

  friend bool operator==(const ChannelSet& a, const ChannelSet& b);

 private:
  std::vector<std::vector<CMatrix>> links_;
  std::vector<CMatrix> noise_;
  std::optional<std::vector<std::vector<double>>> distances_;
};

/// One transmit covariance per user. For the SISO game each entry is an N x 1
/// column holding the per-bin powers p(k), i.e. the diagonal of W^H Q W; the
/// Frobenius norm of a difference is the same in both representations.
struct StrategyProfile {
  std::vector<CMatrix> covariances;

  std::size_t size() const noexcept { return covariances.size(); }
  const CMatrix& operator[](std::size_t q) const { return covariances[q]; }
  CMatrix& operator[](std::size_t q) { return covariances[q]; }
  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

/// Throws DimensionMismatch unless Q_q is tx_dim(q) square for every user.
void require_profile_matches(const StrategyProfile& profile, const ChannelSet& ch);

struct Band {
  std::string label;
  std::size_t begin = 0;  // first bin, 0-based inclusive
  std::size_t end = 0;    // exclusive
  friend bool operator==(const Band&, const Band&) = default;
};

/// Frequency-selective SISO channels over N bins: response(r, q)[k] = H_rq(k).
class SisoScenario {
 public:
  SisoScenario() = default;
  SisoScenario(std::size_t bins, std::vector<std::vector<CVector>> responses,
               std::vector<RVector> noise, std::vector<Band> bands = {});

  std::size_t bin_count() const noexcept { return bins_; }
  std::size_t user_count() const noexcept { return noise_.size(); }
  const CVector& response(std::size_t r, std::size_t q) const { return responses_.at(r).at(q); }
  const RVector& noise(std::size_t q) const { return noise_.at(q); }
  const std::vector<Band>& bands() const noexcept { return bands_; }
  const Band* find_band(const std::string& label) const;

  /// |H_rq(k)|^2 for all k.
  RVector gain(std::size_t r, std::size_t q) const { return response(r, q).cwiseAbs2(); }

  friend bool operator==(const SisoScenario& a, const SisoScenario& b);

 private:
  std::size_t bins_ = 0;
  std::vector<std::vector<CVector>> responses_;
  std::vector<RVector> noise_;
  std::vector<Band> bands_;
};

/// R_{-q} = R_nq + sum_{r!=q} H_rq Q_r H_rq^H
CMatrix mui_covariance(std::size_t q, const StrategyProfile& profile, const ChannelSet& ch);

/// log2 det(I + H_qq^H R_{-q}^{-1} H_qq Q_q), in bits per channel use.
double rate(std::size_t q, const StrategyProfile& profile, const ChannelSet& ch);

/// Same formula for an arbitrary own covariance against a given R_{-q}.
double rate_against(const CMatrix& direct, const CMatrix& interference_plus_noise,
                    const CMatrix& own_covariance);

double sum_rate(const StrategyProfile& profile, const ChannelSet& ch);

/// [W]_ij = exp(j 2 pi i j / N) / sqrt(N), 0-based.
CMatrix idft_matrix(std::size_t n);

/// H_rq = W diag(H_rq(k)) W^H and R_nq = W diag(noise_q(k)) W^H.
ChannelSet circulant_channels(const SisoScenario& s);

/// W diag(p) W^H
CMatrix circulant_covariance(const RVector& powers);

struct RandomMimoParams {
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> antennas;           // per user, square links
  std::vector<std::vector<double>> distances;   // d[r][q] > 0
  double pathloss = 2.0;                        // amplitude scale d^{-pathloss}
  double noise_power = 1.0;                     // R_nq = noise_power * I
};

/// Entries of H_rq are i.i.d. (x + jy)/sqrt(2) scaled by d_rq^{-pathloss}.
/// Deterministic in the seed.
ChannelSet random_mimo_channels(const RandomMimoParams& params);

struct RandomSisoParams {
  std::uint64_t seed = 0;
  std::size_t users = 2;
  std::size_t bins = 64;
  std::size_t taps = 4;
  std::vector<std::vector<double>> distances;  // empty means all ones
  double pathloss = 2.0;
  double noise_power = 1.0;
  std::vector<Band> bands;
};

/// Frequency responses of L-tap impulse responses with i.i.d. CN(0, 1/L) taps,
/// H(k) = sum_l h_l exp(-j 2 pi l k / N), scaled by d_rq^{-pathloss}.
SisoScenario random_siso_scenario(const RandomSisoParams& params);

}  // namespace cogmimo
