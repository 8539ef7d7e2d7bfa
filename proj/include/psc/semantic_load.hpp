#pragma once

#include "psc/model.hpp"

#include <vector>

namespace psc {

struct SegmentId {
  std::size_t user = 0;
  std::size_t segment = 0;  // 0-based
};

/// Segment containing rho under the breakpoint tie-break: segment s covers
/// (L_s, L_{s-1}] except the last, which is closed at both ends, so a shared
/// breakpoint always belongs to the lower segment.
SegmentId segment_of(const PiecewiseLoad& load, std::size_t user, double rho);

/// Computation load g_n(rho) in load-units. rho must lie in [rho_min, 1].
double load_value(const PiecewiseLoad& load, std::size_t user, double rho);

/// p^c = g_n(rho) * p0, watts.
double computation_power(const PiecewiseLoad& load, std::size_t user, double rho, double p0);

/// p^t = p_max - g_n(rho) * p0 under budget tightness. A negative result is a
/// feasibility signal for the caller, not an error.
double transmit_power_from_ratio(const PiecewiseLoad& load, std::size_t user, double rho,
                                 double p0, double max_power_w);

/// Midpoint (L_{s-1} + L_s) / 2 of a segment.
double segment_midpoint(const PiecewiseLoad& load, std::size_t user, std::size_t segment);

/// Feasible range of rho inside one segment; empty when even the segment's
/// upper end cannot afford its computation power.
struct FeasibleInterval {
  double lo = 1.0;
  double hi = 0.0;
  bool empty() const { return lo > hi; }
};

FeasibleInterval feasible_bounds(const PiecewiseLoad& load, std::size_t user,
                                 std::size_t segment, double p0, double max_power_w);

std::vector<FeasibleInterval> feasible_bounds_all(const PiecewiseLoad& load,
                                                  const std::vector<std::size_t>& segments,
                                                  const NetworkConfig& config);

/// Componentwise clamp into per-user bounds; idempotent. All bounds must be
/// nonempty.
arma::vec project(const arma::vec& rho, const std::vector<FeasibleInterval>& bounds);

}  // namespace psc
