#include "psc/channel.hpp"

#include <cmath>

namespace psc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(derive_seed(master_seed, stream_index)) {}

double RngStream::uniform() {
  // 53 random bits mapped exactly onto [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::pair<double, double> RngStream::gaussian_pair() {
  // Box-Muller; u1 shifted into (0, 1] so the log never sees zero.
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return {radius * std::cos(kTwoPi * u2), radius * std::sin(kTwoPi * u2)};
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  auto [first, second] = gaussian_pair();
  spare_ = second;
  has_spare_ = true;
  return first;
}

arma::cx_double RngStream::complex_gaussian(double variance) {
  if (variance < 0.0) throw DomainError("complex_gaussian requires variance >= 0");
  const double scale = std::sqrt(variance / 2.0);
  auto [re, im] = gaussian_pair();
  return {scale * re, scale * im};
}

ChannelMatrix sample_channel(const NetworkConfig& config, RngStream& rng) {
  const double beta = config.channel_gain();
  ChannelMatrix h(config.num_antennas, config.num_users);
  for (std::size_t n = 0; n < config.num_users; ++n)
    for (std::size_t m = 0; m < config.num_antennas; ++m)
      h(m, n) = rng.complex_gaussian(beta);
  return h;
}

double noise_power(const NetworkConfig& config) { return config.noise_watts(); }

}  // namespace psc
