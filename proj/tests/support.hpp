#pragma once

// Shared instance generators for the optimizer tests and the acceptance
// suite. Everything here is deterministic given the seeds it is handed.

#include "psc/channel.hpp"
#include "psc/optimizer.hpp"

#include <cmath>
#include <cstdint>

namespace psc::testing {

inline NetworkConfig make_config(std::size_t users, std::size_t antennas, double sigma2_w,
                                 double pmax_w, double p0) {
  NetworkConfig config;
  config.num_users = users;
  config.num_antennas = antennas;
  config.channel_gain_db = 0.0;
  config.noise_power_dbm = watts_to_dbm(sigma2_w);
  config.max_power_dbm = {watts_to_dbm(pmax_w)};
  config.comp_power_coeff = p0;
  return config;
}

// Two-segment reference load: g = -rho + 2 on (0.6, 1], g = -2 rho + 2.6 on
// [0.2, 0.6], replicated per user.
inline PiecewiseLoad reference_load(std::size_t users) {
  PiecewiseLoad load;
  load.users.assign(users, {{-1.0, 2.0, 0.6}, {-2.0, 2.6, 0.2}});
  return load;
}

inline ChannelMatrix random_channel(const NetworkConfig& config, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample_channel(config, rng);
}

// Random piecewise load with the documented qualitative shape. The raw
// continuous profile is affine-mapped so that g(1) * p0 = f0 * pmax and
// g(rho_min) * p0 = fmin * pmax with f0 < 1 < fmin, which keeps the first
// segment feasible and the last one partially infeasible.
inline PiecewiseLoad random_load(std::size_t users, std::size_t segments, double pmax_w,
                                 double p0, RngStream& rng) {
  PiecewiseLoad load;
  load.users.resize(users);
  for (std::size_t n = 0; n < users; ++n) {
    arma::vec breaks(segments);
    for (auto& b : breaks) b = 0.15 + 0.75 * rng.uniform();
    breaks = arma::sort(breaks, "descend");
    for (std::size_t s = 0; s + 1 < segments; ++s)
      if (breaks(s) - breaks(s + 1) < 0.03) breaks(s + 1) = breaks(s) - 0.03;

    std::vector<LoadSegment> raw(segments);
    double value = 0.1;
    double upper = 1.0;
    for (std::size_t s = 0; s < segments; ++s) {
      raw[s].slope = -(0.2 + 3.0 * rng.uniform()) * (s + 1.0);
      raw[s].lower = breaks(s);
      if (s > 0 && rng.uniform() < 0.3) value += 0.2 * rng.uniform();  // upward jump
      raw[s].intercept = value - raw[s].slope * upper;
      value = raw[s].slope * raw[s].lower + raw[s].intercept;
      upper = raw[s].lower;
    }

    const double budget = pmax_w / p0;
    const double target_top = (0.05 + 0.25 * rng.uniform()) * budget;
    const double target_min = (1.05 + 0.55 * rng.uniform()) * budget;
    const double raw_top = raw.front().slope * 1.0 + raw.front().intercept;
    const double raw_min = value;
    const double a = (target_min - target_top) / (raw_min - raw_top);
    const double b = target_top - a * raw_top;
    for (auto& seg : raw) {
      seg.slope *= a;
      seg.intercept = a * seg.intercept + b;
    }
    load.users[n] = std::move(raw);
  }
  return load;
}

inline bool midpoint_feasible(const PiecewiseLoad& load, const NetworkConfig& config,
                              std::size_t user, std::size_t segment) {
  const double mid = segment_midpoint(load, user, segment);
  return transmit_power_from_ratio(load, user, mid, config.comp_power_coeff,
                                   config.max_power_watts(user)) >= 0.0;
}

// No single-user segment flip (holding the rest) may improve the midpoint
// objective for the choice to count as an alternating-optimization optimum.
inline bool is_single_deviation_optimum(const SegmentChoice& segments, const ChannelMatrix& h,
                                        const NetworkConfig& config, const PiecewiseLoad& load,
                                        const BeamformerPolicy& policy) {
  const double base =
      objective_on_segments(segment_midpoints(load, segments), segments, h, config, load, policy);
  for (std::size_t n = 0; n < segments.size(); ++n) {
    for (std::size_t s = 0; s < load.num_segments(n); ++s) {
      if (s == segments[n] || !midpoint_feasible(load, config, n, s)) continue;
      SegmentChoice candidate = segments;
      candidate[n] = s;
      const double value = objective_on_segments(segment_midpoints(load, candidate), candidate,
                                                 h, config, load, policy);
      if (value > base + 1e-12 * std::max(1.0, std::abs(base))) return false;
    }
  }
  return true;
}

}  // namespace psc::testing
