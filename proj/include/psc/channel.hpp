#pragma once

#include "psc/model.hpp"

#include <cstdint>
#include <random>
#include <utility>

namespace psc {

/// Deterministic per-trial random stream. The same (master_seed, stream_index)
/// pair always reproduces the same draw sequence, independent of every other
/// stream, so Monte-Carlo trials can run in any order.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  /// Uniform draw in [0, 1).
  double uniform();
  /// Standard normal draw (Box-Muller; the spare half of each pair is cached).
  double gaussian();
  /// Circularly-symmetric complex Gaussian with E{|z|^2} = variance.
  arma::cx_double complex_gaussian(double variance);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  std::pair<double, double> gaussian_pair();

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Rayleigh channel draw: each entry is CN(0, beta) with beta the long-term
/// channel power gain from the config.
ChannelMatrix sample_channel(const NetworkConfig& config, RngStream& rng);

double noise_power(const NetworkConfig& config);

}  // namespace psc
