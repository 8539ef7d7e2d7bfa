#include "psc/semantic_load.hpp"

#include <algorithm>
#include <string>

namespace psc {

namespace {

const std::vector<LoadSegment>& segments_of(const PiecewiseLoad& load, std::size_t user) {
  if (user >= load.num_users())
    throw DomainError("user index " + std::to_string(user) + " out of range");
  const auto& segments = load.users[user];
  if (segments.empty())
    throw DomainError("user " + std::to_string(user) + " has no load segments");
  return segments;
}

}  // namespace

SegmentId segment_of(const PiecewiseLoad& load, std::size_t user, double rho) {
  const auto& segments = segments_of(load, user);
  if (!(rho <= 1.0) || !(rho >= segments.back().lower))
    throw DomainError("rho = " + std::to_string(rho) + " outside [rho_min, 1] for user " +
                      std::to_string(user));
  for (std::size_t s = 0; s + 1 < segments.size(); ++s)
    if (rho > segments[s].lower) return {user, s};
  return {user, segments.size() - 1};
}

double load_value(const PiecewiseLoad& load, std::size_t user, double rho) {
  const auto id = segment_of(load, user, rho);
  const auto& seg = load.users[user][id.segment];
  return seg.slope * rho + seg.intercept;
}

double computation_power(const PiecewiseLoad& load, std::size_t user, double rho, double p0) {
  return load_value(load, user, rho) * p0;
}

double transmit_power_from_ratio(const PiecewiseLoad& load, std::size_t user, double rho,
                                 double p0, double max_power_w) {
  return max_power_w - computation_power(load, user, rho, p0);
}

double segment_midpoint(const PiecewiseLoad& load, std::size_t user, std::size_t segment) {
  const auto& segments = segments_of(load, user);
  if (segment >= segments.size())
    throw DomainError("segment index " + std::to_string(segment) + " out of range");
  return 0.5 * (load.upper_bound(user, segment) + load.lower_bound(user, segment));
}

FeasibleInterval feasible_bounds(const PiecewiseLoad& load, std::size_t user,
                                 std::size_t segment, double p0, double max_power_w) {
  const auto& segments = segments_of(load, user);
  if (segment >= segments.size())
    throw DomainError("segment index " + std::to_string(segment) + " out of range");
  const auto& seg = segments[segment];
  // Smallest rho whose computation power still fits the budget; the slope is
  // negative, so the power constraint bounds rho from below.
  const double power_floor = (max_power_w / p0 - seg.intercept) / seg.slope;
  FeasibleInterval interval;
  interval.lo = std::max(power_floor, seg.lower);
  interval.hi = load.upper_bound(user, segment);
  return interval;
}

std::vector<FeasibleInterval> feasible_bounds_all(const PiecewiseLoad& load,
                                                  const std::vector<std::size_t>& segments,
                                                  const NetworkConfig& config) {
  if (segments.size() != load.num_users())
    throw DomainError("segment choice length does not match the load");
  std::vector<FeasibleInterval> out(segments.size());
  for (std::size_t n = 0; n < segments.size(); ++n)
    out[n] = feasible_bounds(load, n, segments[n], config.comp_power_coeff,
                             config.max_power_watts(n));
  return out;
}

arma::vec project(const arma::vec& rho, const std::vector<FeasibleInterval>& bounds) {
  if (rho.n_elem != bounds.size())
    throw DomainError("rho length does not match the number of bounds");
  arma::vec out(rho.n_elem);
  for (arma::uword n = 0; n < rho.n_elem; ++n) {
    if (bounds[n].empty())
      throw DomainError("empty feasible interval for user " + std::to_string(n));
    out(n) = std::clamp(rho(n), bounds[n].lo, bounds[n].hi);
  }
  return out;
}

}  // namespace psc
