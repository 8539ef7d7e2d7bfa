#pragma once

#include "psc/model.hpp"

namespace psc {

/// Effective per-user gains after combining: cross_gain(n, k) = |w_n^H h_k|^2
/// and noise_power(n) = ||w_n||^2 sigma^2. Together they determine every SINR
/// without touching W or H again.
struct EffectiveGains {
  arma::mat cross_gain;   // num_users x num_users
  arma::vec noise_power;  // num_users
};

/// MMSE receive beamformer W = (H P H^H + sigma^2 I)^-1 H P. The system is
/// solved by factorization, never by forming the inverse; correctness is
/// defined by the orthogonality residual below.
arma::cx_mat mmse_matrix(const ChannelMatrix& h, const arma::vec& transmit_power,
                         double noise_power_w);

/// Zero-forcing beamformer W = H (H^H H)^-1, so W^H H = I.
arma::cx_mat zf_matrix(const ChannelMatrix& h);

EffectiveGains effective_gains(const arma::cx_mat& w, const ChannelMatrix& h,
                               double noise_power_w);

/// Per-user SINR from precomputed effective gains.
arma::vec sinr_from_gains(const EffectiveGains& gains, const arma::vec& transmit_power);

/// Per-user SINR of the combined uplink signal. Users with zero transmit
/// power get SINR 0; a zero beamforming column with positive power is an
/// error.
arma::vec sinr(const arma::cx_mat& w, const ChannelMatrix& h, const arma::vec& transmit_power,
               double noise_power_w);

/// C_n = log2(1 + gamma_n), bits/s/Hz.
arma::vec achievable_rate(const arma::vec& sinr_values);

/// R_n = C_n / rho_n, the rate perceived after semantic decoding.
arma::vec equivalent_rate(const arma::vec& rate, const arma::vec& rho);

/// ||W^H (H P H^H + sigma^2 I) - P H^H||_F. Zero exactly when W satisfies the
/// MMSE orthogonality condition; generally positive for any other combiner.
double mmse_orthogonality_residual(const arma::cx_mat& w, const ChannelMatrix& h,
                                   const arma::vec& transmit_power, double noise_power_w);

}  // namespace psc
