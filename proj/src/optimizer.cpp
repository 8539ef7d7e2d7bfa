#include "psc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace psc {

namespace {

// Tolerance for transmit powers that should be exactly zero but carry the
// rounding of the projection arithmetic.
double feasibility_slack(double max_power_w) { return 1e-12 * std::max(1.0, max_power_w); }

struct Evaluator {
  const ChannelMatrix& h;
  const NetworkConfig& config;
  const PiecewiseLoad& load;
  const BeamformerPolicy& policy;
  double sigma2;
  arma::vec pmax;
  arma::cx_mat held_w;

  Evaluator(const ChannelMatrix& h_in, const NetworkConfig& config_in,
            const PiecewiseLoad& load_in, const BeamformerPolicy& policy_in)
      : h(h_in),
        config(config_in),
        load(load_in),
        policy(policy_in),
        sigma2(config_in.noise_watts()),
        pmax(config_in.max_power_watts_all()) {
    if (h.n_cols != config.num_users || h.n_rows != config.num_antennas)
      throw DomainError("channel matrix dimensions do not match the config");
    if (load.num_users() != config.num_users)
      throw DomainError("load does not match the number of users");
    if (policy.kind == BeamformerPolicy::Kind::ZfFixed)
      held_w = zf_matrix(h);
    else if (policy.kind == BeamformerPolicy::Kind::Fixed)
      held_w = policy.fixed_w;
  }

  // Budget-tight transmit powers with g pinned to the chosen segments.
  arma::vec transmit_powers(const arma::vec& rho, const SegmentChoice& segments) const {
    arma::vec pt(rho.n_elem);
    std::vector<std::size_t> infeasible;
    for (arma::uword n = 0; n < rho.n_elem; ++n) {
      const auto& seg = load.users[n][segments[n]];
      const double pc = (seg.slope * rho(n) + seg.intercept) * config.comp_power_coeff;
      double value = pmax(n) - pc;
      if (value < 0.0) {
        if (value < -feasibility_slack(pmax(n))) {
          infeasible.push_back(n);
          continue;
        }
        value = 0.0;
      }
      pt(n) = value;
    }
    if (!infeasible.empty())
      throw InfeasibleError("negative transmit power at the requested compression ratios",
                            std::move(infeasible));
    return pt;
  }

  double eval_with_powers(const arma::vec& transmit_power, const arma::vec& rho) const {
    arma::cx_mat recomputed;
    const arma::cx_mat* active = &held_w;
    if (policy.kind == BeamformerPolicy::Kind::MmseRecompute) {
      recomputed = mmse_matrix(h, transmit_power, sigma2);
      active = &recomputed;
    }
    const arma::vec gamma = sinr(*active, h, transmit_power, sigma2);
    return arma::accu(equivalent_rate(achievable_rate(gamma), rho));
  }

  double eval(const arma::vec& rho, const SegmentChoice& segments) const {
    return eval_with_powers(transmit_powers(rho, segments), rho);
  }

  bool midpoint_feasible(std::size_t user, std::size_t segment) const {
    const double mid = segment_midpoint(load, user, segment);
    return transmit_power_from_ratio(load, user, mid, config.comp_power_coeff, pmax(user)) >= 0.0;
  }
};

void check_segments(const PiecewiseLoad& load, const SegmentChoice& segments) {
  if (segments.size() != load.num_users())
    throw DomainError("segment choice length does not match the load");
  for (std::size_t n = 0; n < segments.size(); ++n)
    if (segments[n] >= load.num_segments(n))
      throw DomainError("segment index out of range for user " + std::to_string(n));
}

}  // namespace

std::vector<arma::uvec> to_theta(const PiecewiseLoad& load, const SegmentChoice& segments) {
  check_segments(load, segments);
  std::vector<arma::uvec> theta(segments.size());
  for (std::size_t n = 0; n < segments.size(); ++n) {
    theta[n] = arma::uvec(load.num_segments(n), arma::fill::zeros);
    theta[n](segments[n]) = 1;
  }
  return theta;
}

arma::vec segment_midpoints(const PiecewiseLoad& load, const SegmentChoice& segments) {
  check_segments(load, segments);
  arma::vec out(segments.size());
  for (std::size_t n = 0; n < segments.size(); ++n)
    out(n) = segment_midpoint(load, n, segments[n]);
  return out;
}

double objective(const arma::vec& rho, const ChannelMatrix& h, const NetworkConfig& config,
                 const PiecewiseLoad& load, const BeamformerPolicy& policy) {
  Evaluator ev(h, config, load, policy);
  if (rho.n_elem != config.num_users)
    throw DomainError("rho length does not match the number of users");

  arma::vec pt(rho.n_elem);
  std::vector<std::size_t> infeasible;
  for (arma::uword n = 0; n < rho.n_elem; ++n) {
    pt(n) = transmit_power_from_ratio(load, n, rho(n), config.comp_power_coeff, ev.pmax(n));
    if (pt(n) < 0.0) infeasible.push_back(n);
  }
  if (!infeasible.empty())
    throw InfeasibleError("negative transmit power at the requested compression ratios",
                          std::move(infeasible));
  return ev.eval_with_powers(pt, rho);
}

double objective_on_segments(const arma::vec& rho, const SegmentChoice& segments,
                             const ChannelMatrix& h, const NetworkConfig& config,
                             const PiecewiseLoad& load, const BeamformerPolicy& policy) {
  check_segments(load, segments);
  Evaluator ev(h, config, load, policy);
  if (rho.n_elem != segments.size())
    throw DomainError("rho length does not match the segment choice");
  return ev.eval(rho, segments);
}

arma::cx_mat stage1(const ChannelMatrix& h, const arma::vec& transmit_power,
                    double noise_power_w, const BeamformerPolicy& policy) {
  switch (policy.kind) {
    case BeamformerPolicy::Kind::MmseRecompute:
      return mmse_matrix(h, transmit_power, noise_power_w);
    case BeamformerPolicy::Kind::ZfFixed:
      return zf_matrix(h);
    case BeamformerPolicy::Kind::Fixed:
      return policy.fixed_w;
  }
  throw Error("unreachable beamformer policy");
}

Stage2Result stage2_ao(const ChannelMatrix& h, const NetworkConfig& config,
                       const PiecewiseLoad& load, const SolverParams& params,
                       const BeamformerPolicy& policy) {
  Evaluator ev(h, config, load, policy);
  const std::size_t n_users = config.num_users;

  // Start every user at its first feasible segment (the largest rho).
  SegmentChoice segments(n_users);
  std::vector<std::size_t> stuck;
  for (std::size_t n = 0; n < n_users; ++n) {
    bool found = false;
    for (std::size_t s = 0; s < load.num_segments(n) && !found; ++s) {
      if (ev.midpoint_feasible(n, s)) {
        segments[n] = s;
        found = true;
      }
    }
    if (!found) stuck.push_back(n);
  }
  if (!stuck.empty())
    throw InfeasibleError("no segment midpoint fits the power budget", std::move(stuck));

  arma::vec mids = segment_midpoints(load, segments);
  double best = ev.eval(mids, segments);
  StageTrace trace{{StageTag::AO, 0, best, mids, 0.0, 0}};

  for (std::size_t pass = 1; pass <= params.i_max; ++pass) {
    bool changed = false;
    for (std::size_t n = 0; n < n_users; ++n) {
      std::size_t best_segment = segments[n];
      double best_value = best;
      for (std::size_t s = 0; s < load.num_segments(n); ++s) {
        if (s == segments[n]) continue;
        // An infeasible candidate scores zero, which never beats the
        // current feasible value (the objective is nonnegative).
        if (!ev.midpoint_feasible(n, s)) continue;
        SegmentChoice candidate = segments;
        candidate[n] = s;
        arma::vec candidate_mids = mids;
        candidate_mids(n) = segment_midpoint(load, n, s);
        const double value = ev.eval(candidate_mids, candidate);
        if (value > best_value) {
          best_value = value;
          best_segment = s;
        }
      }
      if (best_segment != segments[n]) {
        segments[n] = best_segment;
        mids(n) = segment_midpoint(load, n, best_segment);
        best = best_value;
        changed = true;
      }
    }
    trace.push_back({StageTag::AO, pass, best, mids, 0.0, 0});
    // A pass with no change is a fixed point: every row is simultaneously
    // optimal against the others, and the objective improved by 0 < epsilon.
    if (!changed) break;
  }

  return {std::move(segments), std::move(trace)};
}

Stage3Result stage3_gradient_ascent(const SegmentChoice& segments, const ChannelMatrix& h,
                                    const NetworkConfig& config, const PiecewiseLoad& load,
                                    const SolverParams& params, const BeamformerPolicy& policy) {
  check_segments(load, segments);
  Evaluator ev(h, config, load, policy);

  std::vector<FeasibleInterval> bounds = feasible_bounds_all(load, segments, config);
  std::vector<std::size_t> blocked;
  for (std::size_t n = 0; n < bounds.size(); ++n)
    if (bounds[n].empty()) blocked.push_back(n);
  if (!blocked.empty())
    throw InfeasibleError("selected segments have empty feasible intervals", std::move(blocked));

  arma::vec rho = project(segment_midpoints(load, segments), bounds);
  double value = ev.eval(rho, segments);
  StageTrace trace{{StageTag::GA, 0, value, rho, 0.0, 0}};

  for (std::size_t t = 1; t <= params.t_max; ++t) {
    arma::vec gradient(rho.n_elem);
    for (arma::uword n = 0; n < rho.n_elem; ++n) {
      arma::vec probe = rho;
      probe(n) += params.delta;
      gradient(n) = (ev.eval(probe, segments) - value) / params.delta;
    }
    const double gradient_norm2 = arma::dot(gradient, gradient);

    double tau = params.tau_bar;
    bool accepted = false;
    double best_trial_value = -std::numeric_limits<double>::infinity();
    arma::vec best_trial_rho;
    double best_trial_tau = 0.0;
    std::size_t best_trial_shrinks = 0;
    std::size_t shrinks = 0;

    // Once the required Armijo gain drops below the evaluation noise floor
    // the test can only pass on rounding jitter (this happens when a clamped
    // component dominates the gradient norm, making the condition
    // unattainable at any step size); treat that as exhaustion so the
    // best-trial fallback takes over.
    const double noise_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value));

    for (std::size_t b = 0;; ++b) {
      const arma::vec trial = project(rho + tau * gradient, bounds);
      const double trial_value = ev.eval(trial, segments);
      if (trial_value > best_trial_value) {
        best_trial_value = trial_value;
        best_trial_rho = trial;
        best_trial_tau = tau;
        best_trial_shrinks = b;
      }
      const double required_gain = params.xi * tau * gradient_norm2;
      if (required_gain >= noise_floor && trial_value >= value + required_gain) {
        accepted = true;
        best_trial_value = trial_value;
        best_trial_rho = trial;
        best_trial_tau = tau;
        shrinks = b;
        break;
      }
      if (b >= params.b_max || required_gain < noise_floor) break;
      tau *= params.alpha;
    }

    if (!accepted) {
      // Backtracking exhausted: keep the best feasible trial if it improves,
      // otherwise treat the iteration as converged.
      if (!(best_trial_value > value)) break;
      shrinks = best_trial_shrinks;
    }

    const double gain = best_trial_value - value;
    rho = best_trial_rho;
    value = best_trial_value;
    trace.push_back({StageTag::GA, t, value, rho, best_trial_tau, shrinks});
    if (std::abs(gain) < params.epsilon) break;
  }

  return {std::move(rho), std::move(trace)};
}

SolveResult run_three_stage(const ChannelMatrix& h, const NetworkConfig& config,
                            const PiecewiseLoad& load, const SolverParams& params,
                            const BeamformerPolicy& policy) {
  const arma::vec pmax = config.max_power_watts_all();
  const double sigma2 = config.noise_watts();

  // Stage 1: beamformer at the full-power starting point.
  arma::cx_mat w = stage1(h, pmax, sigma2, policy);

  Stage2Result rough = stage2_ao(h, config, load, params, policy);
  Stage3Result refined = stage3_gradient_ascent(rough.segments, h, config, load, params, policy);

  const std::size_t n_users = config.num_users;
  arma::vec transmit_power(n_users);
  for (std::size_t n = 0; n < n_users; ++n) {
    const auto& seg = load.users[n][rough.segments[n]];
    const double pc = (seg.slope * refined.rho(n) + seg.intercept) * config.comp_power_coeff;
    transmit_power(n) = std::max(pmax(n) - pc, 0.0);
  }

  Allocation allocation;
  if (policy.kind == BeamformerPolicy::Kind::MmseRecompute)
    w = mmse_matrix(h, transmit_power, sigma2);
  allocation.beamforming = std::move(w);
  allocation.transmit_power = transmit_power;
  allocation.rho = refined.rho;
  allocation.theta = to_theta(load, rough.segments);
  allocation.objective = objective_on_segments(refined.rho, rough.segments, h, config, load, policy);

  StageTrace trace = std::move(rough.trace);
  trace.insert(trace.end(), refined.trace.begin(), refined.trace.end());
  return {std::move(allocation), std::move(rough.segments), std::move(trace)};
}

ThetaOracle oracle_exhaustive_theta(const ChannelMatrix& h, const NetworkConfig& config,
                                    const PiecewiseLoad& load, const BeamformerPolicy& policy) {
  Evaluator ev(h, config, load, policy);
  const std::size_t n_users = config.num_users;

  double assignments = 1.0;
  for (std::size_t n = 0; n < n_users; ++n)
    assignments *= static_cast<double>(load.num_segments(n));
  if (assignments > 1e6)
    throw Error("exhaustive theta search too large: " + std::to_string(assignments) +
                " assignments exceed the 1e6 guard");

  std::vector<std::vector<std::size_t>> feasible(n_users);
  std::vector<std::size_t> stuck;
  for (std::size_t n = 0; n < n_users; ++n) {
    for (std::size_t s = 0; s < load.num_segments(n); ++s)
      if (ev.midpoint_feasible(n, s)) feasible[n].push_back(s);
    if (feasible[n].empty()) stuck.push_back(n);
  }
  if (!stuck.empty())
    throw InfeasibleError("no segment midpoint fits the power budget", std::move(stuck));

  ThetaOracle best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cursor(n_users, 0);
  SegmentChoice segments(n_users);
  while (true) {
    for (std::size_t n = 0; n < n_users; ++n) segments[n] = feasible[n][cursor[n]];
    const double value = ev.eval(segment_midpoints(load, segments), segments);
    if (value > best.objective) {
      best.objective = value;
      best.segments = segments;
    }
    // Mixed-radix increment, last user fastest.
    std::size_t pos = n_users;
    while (pos > 0) {
      --pos;
      if (++cursor[pos] < feasible[pos].size()) break;
      cursor[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

GridOracle oracle_grid_rho(const SegmentChoice& segments, const ChannelMatrix& h,
                           const NetworkConfig& config, const PiecewiseLoad& load,
                           const BeamformerPolicy& policy, double step) {
  check_segments(load, segments);
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  if (segments.size() > 3) throw Error("grid oracle supports at most 3 users");
  Evaluator ev(h, config, load, policy);

  std::vector<FeasibleInterval> bounds = feasible_bounds_all(load, segments, config);
  std::vector<std::vector<double>> axes(segments.size());
  for (std::size_t n = 0; n < segments.size(); ++n) {
    if (bounds[n].empty())
      throw InfeasibleError("selected segment has an empty feasible interval", {n});
    const double width = bounds[n].hi - bounds[n].lo;
    if (width / step + 1.0 > 1e4)
      throw Error("grid oracle axis for user " + std::to_string(n) + " exceeds 1e4 points");
    for (double v = bounds[n].lo; v < bounds[n].hi; v += step) axes[n].push_back(v);
    axes[n].push_back(bounds[n].hi);
  }

  GridOracle best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cursor(segments.size(), 0);
  arma::vec rho(segments.size());
  while (true) {
    for (std::size_t n = 0; n < segments.size(); ++n) rho(n) = axes[n][cursor[n]];
    const double value = ev.eval(rho, segments);
    if (value > best.objective) {
      best.objective = value;
      best.rho = rho;
    }
    std::size_t pos = segments.size();
    while (pos > 0) {
      --pos;
      if (++cursor[pos] < axes[pos].size()) break;
      cursor[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

}  // namespace psc
