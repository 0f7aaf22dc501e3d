// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cogmimo/error.hpp"

namespace cogmimo {

namespace {

std::string dims(const CMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_noise_pd(const CMatrix& r, std::size_t q) {
  if (!is_hermitian(r)) {
    throw Error(ErrorKind::InvalidChannel, "noise covariance of user " + std::to_string(q) +
                                               " is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(r), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().size() == 0 || es.eigenvalues()(0) <= 0.0) {
    throw Error(ErrorKind::InvalidChannel, "noise covariance of user " + std::to_string(q) +
                                               " is not positive definite");
  }
}

}  // namespace

ChannelSet::ChannelSet(std::vector<std::vector<CMatrix>> links, std::vector<CMatrix> noise,
                       std::optional<std::vector<std::vector<double>>> distances)
    : links_(std::move(links)), noise_(std::move(noise)), distances_(std::move(distances)) {
  const std::size_t users = noise_.size();
  if (users == 0) throw Error(ErrorKind::InvalidChannel, "channel set has no users");
  if (links_.size() != users) {
    throw Error(ErrorKind::DimensionMismatch, "link grid must be user_count x user_count");
  }
  for (const auto& row : links_) {
    if (row.size() != users) {
      throw Error(ErrorKind::DimensionMismatch, "link grid must be user_count x user_count");
    }
  }
  for (std::size_t q = 0; q < users; ++q) {
    const CMatrix& h = links_[q][q];
    if (h.rows() != h.cols() || h.rows() == 0) {
      throw Error(ErrorKind::InvalidChannel,
                  "direct channel of user " + std::to_string(q) + " is " + dims(h) +
                      ", must be square and nonempty");
    }
    Eigen::JacobiSVD<CMatrix> svd(h);
    const RVector& s = svd.singularValues();
    if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) >= kMaxDirectCondition) {
      throw Error(ErrorKind::InvalidChannel,
                  "direct channel of user " + std::to_string(q) + " is singular");
    }
    if (noise_[q].rows() != h.rows() || noise_[q].cols() != h.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "noise covariance of user " + std::to_string(q) +
                                                    " is " + dims(noise_[q]));
    }
    require_noise_pd(noise_[q], q);
  }
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      const CMatrix& h = links_[r][q];
      if (h.rows() != links_[q][q].rows() || h.cols() != links_[r][r].cols()) {
        throw Error(ErrorKind::DimensionMismatch, "link (" + std::to_string(r) + "," +
                                                      std::to_string(q) + ") is " + dims(h));
      }
      if (!h.allFinite()) throw Error(ErrorKind::InvalidChannel, "non-finite channel entry");
    }
  }
  if (distances_) {
    if (distances_->size() != users) {
      throw Error(ErrorKind::DimensionMismatch, "distance grid must be user_count x user_count");
    }
    for (const auto& row : *distances_) {
      if (row.size() != users) {
        throw Error(ErrorKind::DimensionMismatch, "distance grid must be user_count x user_count");
      }
      for (double d : row) {
        if (!(d > 0.0)) throw Error(ErrorKind::InvalidChannel, "distances must be positive");
      }
    }
  }
}

ChannelSet ChannelSet::with_scaled_cross(Complex c) const {
  ChannelSet out = *this;
  for (std::size_t r = 0; r < user_count(); ++r) {
    for (std::size_t q = 0; q < user_count(); ++q) {
      if (r != q) out.links_[r][q] *= c;
    }
  }
  return out;
}

bool operator==(const ChannelSet& a, const ChannelSet& b) {
  return a.links_ == b.links_ && a.noise_ == b.noise_ && a.distances_ == b.distances_;
}

void require_profile_matches(const StrategyProfile& profile, const ChannelSet& ch) {
  if (profile.size() != ch.user_count()) {
    throw Error(ErrorKind::DimensionMismatch, "profile has " + std::to_string(profile.size()) +
                                                  " users, channel has " +
                                                  std::to_string(ch.user_count()));
  }
  for (std::size_t q = 0; q < profile.size(); ++q) {
    if (profile[q].rows() != ch.tx_dim(q) || profile[q].cols() != ch.tx_dim(q)) {
      throw Error(ErrorKind::DimensionMismatch,
                  "covariance of user " + std::to_string(q) + " is " + dims(profile[q]));
    }
  }
}

SisoScenario::SisoScenario(std::size_t bins, std::vector<std::vector<CVector>> responses,
                           std::vector<RVector> noise, std::vector<Band> bands)
    : bins_(bins), responses_(std::move(responses)), noise_(std::move(noise)),
      bands_(std::move(bands)) {
  if (bins_ == 0) throw Error(ErrorKind::InvalidChannel, "SISO scenario needs at least one bin");
  const std::size_t users = noise_.size();
  if (users == 0) throw Error(ErrorKind::InvalidChannel, "SISO scenario has no users");
  if (responses_.size() != users) {
    throw Error(ErrorKind::DimensionMismatch, "response grid must be user_count x user_count");
  }
  for (const auto& row : responses_) {
    if (row.size() != users) {
      throw Error(ErrorKind::DimensionMismatch, "response grid must be user_count x user_count");
    }
    for (const auto& h : row) {
      if (static_cast<std::size_t>(h.size()) != bins_) {
        throw Error(ErrorKind::DimensionMismatch, "frequency response length != bin count");
      }
      if (!h.allFinite()) throw Error(ErrorKind::InvalidChannel, "non-finite response");
    }
  }
  for (const auto& n : noise_) {
    if (static_cast<std::size_t>(n.size()) != bins_) {
      throw Error(ErrorKind::DimensionMismatch, "noise length != bin count");
    }
    if (!(n.array() > 0.0).all()) {
      throw Error(ErrorKind::InvalidChannel, "noise powers must be positive");
    }
  }
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    const Band& b = bands_[i];
    if (b.begin >= b.end || b.end > bins_) {
      throw Error(ErrorKind::InvalidChannel, "band " + b.label + " is out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (b.begin < bands_[j].end && bands_[j].begin < b.end) {
        throw Error(ErrorKind::InvalidChannel, "bands " + bands_[j].label + " and " + b.label +
                                                   " overlap");
      }
    }
  }
}

const Band* SisoScenario::find_band(const std::string& label) const {
  for (const auto& b : bands_) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

bool operator==(const SisoScenario& a, const SisoScenario& b) {
  return a.bins_ == b.bins_ && a.responses_ == b.responses_ && a.noise_ == b.noise_ &&
         a.bands_ == b.bands_;
}

CMatrix mui_covariance(std::size_t q, const StrategyProfile& profile, const ChannelSet& ch) {
  require_profile_matches(profile, ch);
  CMatrix r = ch.noise(q);
  for (std::size_t s = 0; s < ch.user_count(); ++s) {
    if (s == q) continue;
    const CMatrix& h = ch.link(s, q);
    r.noalias() += h * profile[s] * h.adjoint();
  }
  return hermitian_part(r);
}

double rate_against(const CMatrix& direct, const CMatrix& interference_plus_noise,
                    const CMatrix& own_covariance) {
  // det(I + H^H R^{-1} H Q) = det(I + L^{-1} H Q H^H L^{-H}) with R = L L^H.
  Eigen::LLT<CMatrix> llt(hermitian_part(interference_plus_noise));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidChannel, "interference-plus-noise covariance is singular");
  }
  const CMatrix a = llt.matrixL().solve(direct);
  const Eigen::Index n = a.rows();
  const CMatrix m = CMatrix::Identity(n, n) + a * own_covariance * a.adjoint();
  return std::max(0.0, log2_det_hpd(m));
}

double rate(std::size_t q, const StrategyProfile& profile, const ChannelSet& ch) {
  return rate_against(ch.direct(q), mui_covariance(q, profile, ch), profile[q]);
}

double sum_rate(const StrategyProfile& profile, const ChannelSet& ch) {
  double total = 0.0;
  for (std::size_t q = 0; q < ch.user_count(); ++q) total += rate(q, profile, ch);
  return total;
}

CMatrix idft_matrix(std::size_t n) {
  CMatrix w(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce the exponent modulo n first to keep the phase argument small.
      const auto e = static_cast<double>((i * j) % n);
      w(i, j) = std::polar(scale, 2.0 * std::numbers::pi * e / static_cast<double>(n));
    }
  }
  return w;
}

CMatrix circulant_covariance(const RVector& powers) {
  const CMatrix w = idft_matrix(static_cast<std::size_t>(powers.size()));
  return hermitian_part(w * powers.cast<Complex>().asDiagonal() * w.adjoint());
}

ChannelSet circulant_channels(const SisoScenario& s) {
  const std::size_t users = s.user_count();
  const CMatrix w = idft_matrix(s.bin_count());
  std::vector<std::vector<CMatrix>> links(users, std::vector<CMatrix>(users));
  std::vector<CMatrix> noise(users);
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      links[r][q] = w * s.response(r, q).asDiagonal() * w.adjoint();
    }
  }
  for (std::size_t q = 0; q < users; ++q) {
    noise[q] = hermitian_part(w * s.noise(q).cast<Complex>().asDiagonal() * w.adjoint());
  }
  return ChannelSet(std::move(links), std::move(noise));
}

namespace {

Complex complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double x = normal(rng);
  const double y = normal(rng);
  return Complex(x, y) / std::numbers::sqrt2;
}

double distance_scale(const std::vector<std::vector<double>>& d, std::size_t r, std::size_t q,
                      double pathloss) {
  if (d.empty()) return 1.0;
  const double dist = d.at(r).at(q);
  if (!(dist > 0.0)) throw Error(ErrorKind::BadParams, "distances must be positive");
  return std::pow(dist, -pathloss);
}

}  // namespace

ChannelSet random_mimo_channels(const RandomMimoParams& params) {
  const std::size_t users = params.antennas.size();
  if (users == 0) throw Error(ErrorKind::BadParams, "need at least one user");
  if (!params.distances.empty() && params.distances.size() != users) {
    throw Error(ErrorKind::BadParams, "distance grid must be user_count x user_count");
  }
  if (!(params.noise_power > 0.0)) throw Error(ErrorKind::BadParams, "noise power must be > 0");
  std::mt19937_64 rng(params.seed);
  std::vector<std::vector<CMatrix>> links(users, std::vector<CMatrix>(users));
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      const double scale = distance_scale(params.distances, r, q, params.pathloss);
      CMatrix h(params.antennas[q], params.antennas[r]);
      // Column-major fill order is part of the determinism contract.
      for (Eigen::Index j = 0; j < h.cols(); ++j) {
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) = scale * complex_gaussian(rng);
      }
      links[r][q] = std::move(h);
    }
  }
  std::vector<CMatrix> noise(users);
  for (std::size_t q = 0; q < users; ++q) {
    noise[q] = params.noise_power * CMatrix::Identity(params.antennas[q], params.antennas[q]);
  }
  std::optional<std::vector<std::vector<double>>> d;
  if (!params.distances.empty()) d = params.distances;
  return ChannelSet(std::move(links), std::move(noise), std::move(d));
}

SisoScenario random_siso_scenario(const RandomSisoParams& params) {
  if (params.users == 0 || params.bins == 0 || params.taps == 0) {
    throw Error(ErrorKind::BadParams, "users, bins and taps must be positive");
  }
  if (!params.distances.empty() && params.distances.size() != params.users) {
    throw Error(ErrorKind::BadParams, "distance grid must be user_count x user_count");
  }
  const std::size_t n = params.bins;
  std::mt19937_64 rng(params.seed);
  std::vector<std::vector<CVector>> responses(params.users, std::vector<CVector>(params.users));
  for (std::size_t r = 0; r < params.users; ++r) {
    for (std::size_t q = 0; q < params.users; ++q) {
      const double scale = distance_scale(params.distances, r, q, params.pathloss);
      std::vector<Complex> taps(params.taps);
      for (auto& t : taps) t = scale * complex_gaussian(rng) / std::sqrt(double(params.taps));
      CVector h = CVector::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < params.taps; ++l) {
          const auto e = static_cast<double>((l * k) % n);
          h(static_cast<Eigen::Index>(k)) +=
              taps[l] * std::polar(1.0, -2.0 * std::numbers::pi * e / static_cast<double>(n));
        }
      }
      responses[r][q] = std::move(h);
    }
  }
  std::vector<RVector> noise(params.users,
                             RVector::Constant(static_cast<Eigen::Index>(n), params.noise_power));
  return SisoScenario(n, std::move(responses), std::move(noise), params.bands);
}

}  // namespace cogmimo
