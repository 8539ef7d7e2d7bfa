#pragma once

#include "psc/beamforming.hpp"
#include "psc/model.hpp"
#include "psc/semantic_load.hpp"

#include <vector>

namespace psc {

/// How the receive beamformer is obtained whenever the objective is
/// evaluated. MmseRecompute re-derives W from the transmit powers implied by
/// rho on every evaluation; ZfFixed and Fixed hold one matrix throughout.
struct BeamformerPolicy {
  enum class Kind { MmseRecompute, ZfFixed, Fixed };

  Kind kind = Kind::MmseRecompute;
  arma::cx_mat fixed_w;

  static BeamformerPolicy mmse() { return {Kind::MmseRecompute, {}}; }
  static BeamformerPolicy zf() { return {Kind::ZfFixed, {}}; }
  static BeamformerPolicy fixed(arma::cx_mat w) { return {Kind::Fixed, std::move(w)}; }
};

enum class StageTag { AO, GA, Final };

struct TraceEntry {
  StageTag stage = StageTag::Final;
  std::size_t iteration = 0;
  double objective = 0.0;
  arma::vec rho;
  double tau = 0.0;            // GA accepted step size only
  std::size_t backtracks = 0;  // GA shrink count only
};

using StageTrace = std::vector<TraceEntry>;

/// Selected load segment per user (0-based).
using SegmentChoice = std::vector<std::size_t>;

std::vector<arma::uvec> to_theta(const PiecewiseLoad& load, const SegmentChoice& segments);
arma::vec segment_midpoints(const PiecewiseLoad& load, const SegmentChoice& segments);

/// Sum of equivalent rates at rho, with every user's transmit power fixed by
/// budget tightness p^t = p_max - g(rho) p0 and g evaluated piecewise. Any
/// user with negative transmit power makes the point infeasible.
double objective(const arma::vec& rho, const ChannelMatrix& h, const NetworkConfig& config,
                 const PiecewiseLoad& load, const BeamformerPolicy& policy);

/// Same objective with g pinned to the chosen segment's line for each user,
/// which stays defined when a probe point steps just past a breakpoint.
double objective_on_segments(const arma::vec& rho, const SegmentChoice& segments,
                             const ChannelMatrix& h, const NetworkConfig& config,
                             const PiecewiseLoad& load, const BeamformerPolicy& policy);

/// Stage 1: the receive beamformer for the given transmit powers.
arma::cx_mat stage1(const ChannelMatrix& h, const arma::vec& transmit_power,
                    double noise_power_w, const BeamformerPolicy& policy);

struct Stage2Result {
  SegmentChoice segments;
  StageTrace trace;
};

/// Stage 2: alternating optimization over the one-hot segment matrix, each
/// user evaluated at its segment midpoints. Sweeps users in order, keeps the
/// best feasible segment per user, and stops at a pass that changes nothing,
/// so the result is a single-user-deviation local optimum.
Stage2Result stage2_ao(const ChannelMatrix& h, const NetworkConfig& config,
                       const PiecewiseLoad& load, const SolverParams& params,
                       const BeamformerPolicy& policy);

struct Stage3Result {
  arma::vec rho;
  StageTrace trace;
};

/// Stage 3: projected gradient ascent over rho inside the segments chosen in
/// stage 2, with forward-difference gradients and Armijo backtracking.
Stage3Result stage3_gradient_ascent(const SegmentChoice& segments, const ChannelMatrix& h,
                                    const NetworkConfig& config, const PiecewiseLoad& load,
                                    const SolverParams& params, const BeamformerPolicy& policy);

struct SolveResult {
  Allocation allocation;
  SegmentChoice segments;
  StageTrace trace;
};

/// The full three-stage pipeline. The returned allocation satisfies budget
/// tightness p^t + g(rho) p0 = p_max per user and carries the beamformer
/// matching the final powers.
SolveResult run_three_stage(const ChannelMatrix& h, const NetworkConfig& config,
                            const PiecewiseLoad& load, const SolverParams& params,
                            const BeamformerPolicy& policy);

struct ThetaOracle {
  SegmentChoice segments;
  double objective = 0.0;
};

/// Exhaustive search over all segment assignments at midpoints. Guarded to
/// at most 1e6 assignments; infeasible assignments are excluded.
ThetaOracle oracle_exhaustive_theta(const ChannelMatrix& h, const NetworkConfig& config,
                                    const PiecewiseLoad& load, const BeamformerPolicy& policy);

struct GridOracle {
  arma::vec rho;
  double objective = 0.0;
};

/// Dense grid search over the feasible boxes of the chosen segments. Limited
/// to 3 users and 1e4 points per axis.
GridOracle oracle_grid_rho(const SegmentChoice& segments, const ChannelMatrix& h,
                           const NetworkConfig& config, const PiecewiseLoad& load,
                           const BeamformerPolicy& policy, double step);

}  // namespace psc
