#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "psc/channel.hpp"

#include <cmath>

using namespace psc;

TEST_CASE("identical (seed, index) reproduces the channel bit for bit") {
  NetworkConfig config;
  RngStream a(42, 3);
  RngStream b(42, 3);
  const ChannelMatrix ha = sample_channel(config, a);
  const ChannelMatrix hb = sample_channel(config, b);
  REQUIRE(ha.n_rows == hb.n_rows);
  REQUIRE(ha.n_cols == hb.n_cols);
  for (arma::uword i = 0; i < ha.n_elem; ++i) {
    CHECK(ha(i).real() == hb(i).real());
    CHECK(ha(i).imag() == hb(i).imag());
  }
}

TEST_CASE("different stream indices decorrelate the draws") {
  NetworkConfig config;
  RngStream a(42, 0);
  RngStream b(42, 1);
  const ChannelMatrix ha = sample_channel(config, a);
  const ChannelMatrix hb = sample_channel(config, b);
  CHECK(arma::norm(ha - hb, "fro") > 0.0);
}

TEST_CASE("zero channel gain yields the zero matrix") {
  NetworkConfig config;
  config.channel_gain_db = -std::numeric_limits<double>::infinity();
  // db_to_linear(-inf) = 0; degenerate but well-defined.
  RngStream rng(7, 0);
  const ChannelMatrix h = sample_channel(config, rng);
  CHECK(arma::norm(h, "fro") == 0.0);
}

TEST_CASE("sample power matches the configured gain") {
  NetworkConfig config;
  config.num_antennas = 50;
  config.num_users = 40;  // 2000 entries per draw
  config.channel_gain_db = -90.0;
  const double beta = config.channel_gain();

  RngStream rng(1234, 0);
  double sum = 0.0;
  std::size_t count = 0;
  for (int rep = 0; rep < 50; ++rep) {  // 1e5 entries in total
    const ChannelMatrix h = sample_channel(config, rng);
    sum += arma::accu(arma::square(arma::abs(h)));
    count += h.n_elem;
  }
  const double mean_power = sum / static_cast<double>(count);
  // Law of large numbers on |H_ij|^2 with mean beta.
  CHECK(std::abs(mean_power - beta) / beta < 0.03);
}

TEST_CASE("per-entry variance within three standard errors") {
  // |H|^2 is exponential with mean beta and standard deviation beta, so the
  // sample mean of 1e4 draws has standard error beta / 100.
  NetworkConfig config;
  config.num_antennas = 100;
  config.num_users = 100;
  config.channel_gain_db = 0.0;

  RngStream rng(99, 5);
  const ChannelMatrix h = sample_channel(config, rng);
  const double mean_power = arma::accu(arma::square(arma::abs(h))) / h.n_elem;
  CHECK(std::abs(mean_power - 1.0) < 3.0 * 0.01);

  // Real and imaginary parts each carry half the power.
  const double re_var = arma::accu(arma::square(arma::real(h))) / h.n_elem;
  const double im_var = arma::accu(arma::square(arma::imag(h))) / h.n_elem;
  CHECK(std::abs(re_var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0) / 100.0);
  CHECK(std::abs(im_var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0) / 100.0);
}

TEST_CASE("real and imaginary parts are uncorrelated") {
  NetworkConfig config;
  config.num_antennas = 100;
  config.num_users = 100;
  config.channel_gain_db = 0.0;

  RngStream rng(2024, 0);
  const ChannelMatrix h = sample_channel(config, rng);
  const arma::vec re = arma::vectorise(arma::real(h));
  const arma::vec im = arma::vectorise(arma::imag(h));
  const double correlation = arma::as_scalar(arma::cor(re, im));
  CHECK(std::abs(correlation) < 0.05);
}

TEST_CASE("gaussian moments") {
  RngStream rng(5, 11);
  const std::size_t n = 20000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.gaussian();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sum2 / n - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("noise_power converts dBm at the boundary") {
  NetworkConfig config;
  config.noise_power_dbm = -10.0;
  CHECK(noise_power(config) == doctest::Approx(1e-4).epsilon(1e-14));
  config.noise_power_dbm = 0.0;
  CHECK(noise_power(config) == doctest::Approx(1e-3).epsilon(1e-14));
  config.noise_power_dbm = -90.0;
  CHECK(noise_power(config) == doctest::Approx(1e-12).epsilon(1e-14));
}
