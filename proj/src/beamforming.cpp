#include "psc/beamforming.hpp"

#include <cmath>
#include <string>

namespace psc {

namespace {

arma::cx_mat power_diag(const arma::vec& transmit_power) {
  return arma::diagmat(arma::conv_to<arma::cx_vec>::from(transmit_power));
}

void check_dims(const arma::cx_mat& w, const ChannelMatrix& h) {
  if (w.n_rows != h.n_rows || w.n_cols != h.n_cols)
    throw DomainError("beamformer/channel dimensions do not match");
}

void check_powers(const ChannelMatrix& h, const arma::vec& transmit_power) {
  if (transmit_power.n_elem != h.n_cols)
    throw DomainError("transmit power vector length does not match the number of users");
  for (arma::uword n = 0; n < transmit_power.n_elem; ++n)
    if (!(transmit_power(n) >= 0.0) || !std::isfinite(transmit_power(n)))
      throw DomainError("transmit power must be finite and >= 0");
}

}  // namespace

arma::cx_mat mmse_matrix(const ChannelMatrix& h, const arma::vec& transmit_power,
                         double noise_power_w) {
  check_powers(h, transmit_power);
  if (noise_power_w < 0.0) throw DomainError("noise power must be >= 0");

  const arma::cx_mat hp = h * power_diag(transmit_power);
  const arma::cx_mat system =
      hp * h.t() + noise_power_w * arma::eye<arma::cx_mat>(h.n_rows, h.n_rows);
  arma::cx_mat w;
  if (!arma::solve(w, system, hp, arma::solve_opts::no_approx))
    throw SingularMatrixError("MMSE system matrix H P H^H + sigma^2 I is singular");
  return w;
}

arma::cx_mat zf_matrix(const ChannelMatrix& h) {
  const arma::cx_mat gram = h.t() * h;
  arma::cx_mat wh;  // (H^H H)^-1 H^H
  if (!arma::solve(wh, gram, h.t(), arma::solve_opts::no_approx))
    throw SingularMatrixError("zero-forcing requires H with full column rank");
  return wh.t();
}

EffectiveGains effective_gains(const arma::cx_mat& w, const ChannelMatrix& h,
                               double noise_power_w) {
  check_dims(w, h);
  EffectiveGains gains;
  const arma::cx_mat combined = w.t() * h;  // (n, k) = w_n^H h_k
  gains.cross_gain = arma::square(arma::abs(combined));
  gains.noise_power =
      arma::sum(arma::square(arma::abs(w)), 0).t() * noise_power_w;
  return gains;
}

arma::vec sinr_from_gains(const EffectiveGains& gains, const arma::vec& transmit_power) {
  const arma::uword n_users = transmit_power.n_elem;
  if (gains.cross_gain.n_rows != n_users || gains.cross_gain.n_cols != n_users ||
      gains.noise_power.n_elem != n_users)
    throw DomainError("effective gains do not match the number of users");

  arma::vec out(n_users, arma::fill::zeros);
  for (arma::uword n = 0; n < n_users; ++n) {
    if (transmit_power(n) == 0.0) continue;
    double interference = 0.0;
    for (arma::uword k = 0; k < n_users; ++k)
      if (k != n) interference += gains.cross_gain(n, k) * transmit_power(k);
    const double denominator = interference + gains.noise_power(n);
    if (denominator <= 0.0)
      throw UndefinedSinrError("SINR undefined for user " + std::to_string(n) +
                               ": zero interference-plus-noise with positive power");
    out(n) = gains.cross_gain(n, n) * transmit_power(n) / denominator;
  }
  return out;
}

arma::vec sinr(const arma::cx_mat& w, const ChannelMatrix& h, const arma::vec& transmit_power,
               double noise_power_w) {
  check_dims(w, h);
  check_powers(h, transmit_power);
  for (arma::uword n = 0; n < transmit_power.n_elem; ++n)
    if (transmit_power(n) > 0.0 && arma::norm(w.col(n)) == 0.0)
      throw UndefinedSinrError("SINR undefined for user " + std::to_string(n) +
                               ": zero beamforming vector with positive power");
  return sinr_from_gains(effective_gains(w, h, noise_power_w), transmit_power);
}

arma::vec achievable_rate(const arma::vec& sinr_values) {
  for (arma::uword n = 0; n < sinr_values.n_elem; ++n)
    if (!(sinr_values(n) >= 0.0))
      throw DomainError("SINR must be >= 0");
  return arma::log2(1.0 + sinr_values);
}

arma::vec equivalent_rate(const arma::vec& rate, const arma::vec& rho) {
  if (rate.n_elem != rho.n_elem)
    throw DomainError("rate and rho vectors must have the same length");
  for (arma::uword n = 0; n < rho.n_elem; ++n)
    if (!(rho(n) > 0.0)) throw DomainError("compression ratio must be positive");
  return rate / rho;
}

double mmse_orthogonality_residual(const arma::cx_mat& w, const ChannelMatrix& h,
                                   const arma::vec& transmit_power, double noise_power_w) {
  check_dims(w, h);
  check_powers(h, transmit_power);
  const arma::cx_mat p = power_diag(transmit_power);
  const arma::cx_mat system =
      h * p * h.t() + noise_power_w * arma::eye<arma::cx_mat>(h.n_rows, h.n_rows);
  return arma::norm(w.t() * system - p * h.t(), "fro");
}

}  // namespace psc
