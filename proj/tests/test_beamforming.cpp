#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "psc/beamforming.hpp"
#include "psc/channel.hpp"

#include <cmath>

using namespace psc;

namespace {

ChannelMatrix random_channel(std::size_t antennas, std::size_t users, double beta,
                             std::uint64_t seed) {
  NetworkConfig config;
  config.num_antennas = antennas;
  config.num_users = users;
  config.channel_gain_db = linear_to_db(beta);
  RngStream rng(seed, 0);
  return sample_channel(config, rng);
}

arma::vec random_powers(std::size_t users, double scale, std::uint64_t seed) {
  RngStream rng(seed, 1);
  arma::vec p(users);
  for (auto& v : p) v = scale * rng.uniform();
  return p;
}

// Straight-line restatement of the SINR definition, independent of the
// library path: gamma_n = |w_n^H h_n|^2 p_n / (sum_{k != n} |w_n^H h_k|^2 p_k
// + ||w_n||^2 sigma^2).
double sinr_by_hand(const arma::cx_mat& w, const ChannelMatrix& h, const arma::vec& p,
                    double sigma2, arma::uword n) {
  const arma::cx_double wh_n = arma::cdot(w.col(n), h.col(n));
  const double numerator = std::norm(wh_n) * p(n);
  double denominator = std::pow(arma::norm(w.col(n)), 2) * sigma2;
  for (arma::uword k = 0; k < h.n_cols; ++k) {
    if (k == n) continue;
    denominator += std::norm(arma::cdot(w.col(n), h.col(k))) * p(k);
  }
  return numerator / denominator;
}

}  // namespace

TEST_CASE("mmse scalar closed form") {
  ChannelMatrix h(1, 1);
  h(0, 0) = 1.0;
  const arma::cx_mat w = mmse_matrix(h, arma::vec{2.0}, 1.0);
  CHECK(w(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(w(0, 0).imag() == doctest::Approx(0.0));
}

TEST_CASE("zero transmit power annihilates the mmse beamformer") {
  const ChannelMatrix h = random_channel(4, 2, 1.0, 17);
  const arma::cx_mat w = mmse_matrix(h, arma::vec{0.0, 0.0}, 0.5);
  CHECK(arma::norm(w, "fro") == 0.0);
}

TEST_CASE("mmse orthogonality identity on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelMatrix h = random_channel(16, 8, 1e-9, 100 + seed);
    const arma::vec p = random_powers(8, 1.0, 100 + seed);
    const double sigma2 = 1e-4;
    const arma::cx_mat w = mmse_matrix(h, p, sigma2);

    const arma::cx_mat pd = arma::diagmat(arma::conv_to<arma::cx_vec>::from(p));
    const double reference = arma::norm(pd * h.t(), "fro");
    CHECK(mmse_orthogonality_residual(w, h, p, sigma2) <= 1e-10 * reference);
  }
}

TEST_CASE("mmse rejects a singular noiseless system") {
  // One user on two antennas: H P H^H has rank 1, so sigma^2 = 0 leaves the
  // system singular.
  ChannelMatrix h(2, 1);
  h(0, 0) = 1.0;
  h(1, 0) = 2.0;
  CHECK_THROWS_AS(mmse_matrix(h, arma::vec{1.0}, 0.0), SingularMatrixError);
}

TEST_CASE("zf on the identity channel") {
  const ChannelMatrix h = arma::eye<arma::cx_mat>(3, 3);
  const arma::cx_mat w = zf_matrix(h);
  CHECK(arma::norm(w - h, "fro") <= 1e-14);
}

TEST_CASE("zf scalar") {
  ChannelMatrix h(1, 1);
  h(0, 0) = 2.0;
  const arma::cx_mat w = zf_matrix(h);
  CHECK(w(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("zf nulls the channel cross terms") {
  const ChannelMatrix h = random_channel(16, 8, 1e-9, 7);
  const arma::cx_mat w = zf_matrix(h);
  const arma::cx_mat should_be_identity = w.t() * h;
  CHECK(arma::norm(should_be_identity - arma::eye<arma::cx_mat>(8, 8), "fro") <= 1e-10);
}

TEST_CASE("zf rejects rank-deficient channels") {
  ChannelMatrix h = random_channel(4, 3, 1.0, 5);
  h.col(2) = h.col(1);  // duplicate user position
  CHECK_THROWS_AS(zf_matrix(h), SingularMatrixError);
}

TEST_CASE("sinr scalar arithmetic") {
  ChannelMatrix h(1, 1);
  h(0, 0) = 1.0;
  arma::cx_mat w(1, 1);
  w(0, 0) = 2.0 / 3.0;
  const arma::vec gamma = sinr(w, h, arma::vec{2.0}, 1.0);
  CHECK(gamma(0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("zero power means zero sinr, zero rate") {
  const ChannelMatrix h = random_channel(4, 2, 1.0, 3);
  const arma::cx_mat w = mmse_matrix(h, arma::vec{0.0, 0.0}, 1.0);
  const arma::vec gamma = sinr(w, h, arma::vec{0.0, 0.0}, 1.0);
  CHECK(gamma(0) == 0.0);
  CHECK(gamma(1) == 0.0);
  const arma::vec rate = achievable_rate(gamma);
  CHECK(rate(0) == 0.0);
  CHECK(rate(1) == 0.0);
}

TEST_CASE("zero beamformer with positive power is undefined") {
  const ChannelMatrix h = random_channel(4, 2, 1.0, 3);
  arma::cx_mat w(4, 2, arma::fill::zeros);
  CHECK_THROWS_AS(sinr(w, h, arma::vec{1.0, 1.0}, 1.0), UndefinedSinrError);
}

TEST_CASE("zf interference term vanishes") {
  const ChannelMatrix h = random_channel(6, 2, 1.0, 21);
  const arma::cx_mat w = zf_matrix(h);
  const double sigma2 = 0.3;
  const arma::vec p{1.5, 0.7};

  const EffectiveGains gains = effective_gains(w, h, sigma2);
  CHECK(gains.cross_gain(0, 1) <= 1e-20);
  CHECK(gains.cross_gain(1, 0) <= 1e-20);

  // With W^H H = I the SINR collapses to p_n / (||w_n||^2 sigma^2).
  const arma::vec gamma = sinr(w, h, p, sigma2);
  for (arma::uword n = 0; n < 2; ++n) {
    const double expected = p(n) / (std::pow(arma::norm(w.col(n)), 2) * sigma2);
    CHECK(gamma(n) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("effective gains reproduce the scalar example") {
  ChannelMatrix h(1, 1);
  h(0, 0) = 1.0;
  arma::cx_mat w(1, 1);
  w(0, 0) = 2.0 / 3.0;
  const EffectiveGains gains = effective_gains(w, h, 1.0);
  CHECK(gains.cross_gain(0, 0) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(gains.noise_power(0) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("gains formulation agrees with the direct definition") {
  const ChannelMatrix h = random_channel(8, 4, 1.0, 33);
  const arma::vec p = random_powers(4, 2.0, 33);
  const double sigma2 = 0.8;
  const arma::cx_mat w = mmse_matrix(h, p, sigma2);

  const arma::vec via_lib = sinr(w, h, p, sigma2);
  const arma::vec via_gains = sinr_from_gains(effective_gains(w, h, sigma2), p);
  for (arma::uword n = 0; n < 4; ++n) {
    CHECK(via_lib(n) == via_gains(n));  // same arithmetic path, exactly equal
    CHECK(via_lib(n) ==
          doctest::Approx(sinr_by_hand(w, h, p, sigma2, n)).epsilon(1e-12));
  }
}

TEST_CASE("achievable rate anchor points") {
  const arma::vec rate = achievable_rate(arma::vec{0.0, 1.0, 3.0});
  CHECK(rate(0) == 0.0);
  CHECK(rate(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rate(2) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("equivalent rate") {
  const arma::vec c{2.0, 2.0};
  CHECK(equivalent_rate(c, arma::vec{1.0, 1.0})(0) == 2.0);
  CHECK(equivalent_rate(c, arma::vec{0.5, 1.0})(0) == doctest::Approx(4.0));
  const double c3 = std::log2(3.0);
  CHECK(equivalent_rate(arma::vec{c3}, arma::vec{0.25})(0) ==
        doctest::Approx(6.33985000288463).epsilon(1e-10));
  CHECK_THROWS_AS(equivalent_rate(c, arma::vec{0.0, 1.0}), DomainError);
}

TEST_CASE("equivalent rate strictly decreasing in rho for positive rate") {
  const arma::vec c{1.7};
  double prev = std::numeric_limits<double>::infinity();
  for (double rho = 0.1; rho <= 1.0; rho += 0.1) {
    const double r = equivalent_rate(c, arma::vec{rho})(0);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("orthogonality residual distinguishes mmse from zf") {
  CHECK(mmse_orthogonality_residual(arma::cx_mat(3, 2, arma::fill::zeros),
                                    ChannelMatrix(3, 2, arma::fill::zeros),
                                    arma::vec{0.0, 0.0}, 1.0) == 0.0);

  const ChannelMatrix h = random_channel(6, 3, 1.0, 8);
  const arma::vec p = random_powers(3, 1.0, 8);
  const double sigma2 = 1e-4;
  const arma::cx_mat w_zf = zf_matrix(h);
  CHECK(mmse_orthogonality_residual(w_zf, h, p, sigma2) > 0.0);
}

TEST_CASE("sinr is invariant to beamformer scaling") {
  RngStream rng(77, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const ChannelMatrix h = random_channel(5, 3, 1.0, 200 + rep);
    const arma::vec p = random_powers(3, 1.5, 200 + rep);
    const double sigma2 = 0.1 + rng.uniform();
    const arma::cx_mat w = mmse_matrix(h, p + 0.1, sigma2);
    const arma::vec base = sinr(w, h, p, sigma2);

    arma::cx_mat scaled = w;
    const arma::uword n = rng.uniform() < 0.5 ? 0 : 2;
    const arma::cx_double c(0.3 + rng.uniform(), rng.uniform() - 0.5);
    scaled.col(n) *= c;
    const arma::vec perturbed = sinr(scaled, h, p, sigma2);
    for (arma::uword k = 0; k < 3; ++k) {
      const double denom = std::max(std::abs(base(k)), 1e-300);
      CHECK(std::abs(perturbed(k) - base(k)) / denom <= 1e-10);
    }
  }
}

TEST_CASE("scalar mmse beats a dense grid on mean square error") {
  // MSE(w) = w^2 (h^2 p + sigma^2) - 2 w h p + p for real w, h.
  RngStream rng(31, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const double h_val = 0.1 + 2.9 * rng.uniform();
    const double p = 0.1 + 4.9 * rng.uniform();
    const double sigma2 = 0.1 + 1.9 * rng.uniform();

    ChannelMatrix h(1, 1);
    h(0, 0) = h_val;
    const double w_opt = mmse_matrix(h, arma::vec{p}, sigma2)(0, 0).real();

    auto mse = [&](double w) { return w * w * (h_val * h_val * p + sigma2) - 2.0 * w * h_val * p + p; };
    double best = std::numeric_limits<double>::infinity();
    for (double w = -10.0; w <= 10.0; w += 1e-3) best = std::min(best, mse(w));
    CHECK(mse(w_opt) <= best + 1e-12);
  }
}

TEST_CASE("sinr nondecreasing in own power under a fixed beamformer") {
  const ChannelMatrix h = random_channel(6, 3, 1.0, 55);
  const double sigma2 = 0.4;
  const arma::cx_mat w = mmse_matrix(h, arma::vec{1.0, 1.0, 1.0}, sigma2);
  arma::vec p{0.5, 0.8, 1.1};
  double prev = -1.0;
  for (double own = 0.0; own <= 3.0; own += 0.25) {
    p(1) = own;
    const double gamma = sinr(w, h, p, sigma2)(1);
    CHECK(gamma >= prev);
    prev = gamma;
  }
}
