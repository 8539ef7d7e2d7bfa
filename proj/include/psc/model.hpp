#pragma once

#include <armadillo>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psc {

/// Uplink channel matrix H, one column per user (num_antennas x num_users).
using ChannelMatrix = arma::cx_mat;

// dB/dBm conversions live at the configuration boundary; everything past
// validation works in watts and linear gains.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double gain);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  explicit ValidationError(std::vector<std::string> issues);
  std::vector<std::string> issues;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct UndefinedSinrError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

/// A requested allocation cannot satisfy the per-user power budget;
/// `users` lists the offending (0-based) user indices.
struct InfeasibleError : Error {
  InfeasibleError(const std::string& what, std::vector<std::size_t> users);
  std::vector<std::size_t> users;
};

/// Scalar system parameters. Gains and powers are stored in dB/dBm as they
/// appear in configuration files; the accessors hand out linear units.
struct NetworkConfig {
  std::size_t num_users = 8;
  std::size_t num_antennas = 16;
  double channel_gain_db = -90.0;  // long-term channel power gain (beta)
  double noise_power_dbm = -10.0;  // average noise power (sigma^2)
  double comp_power_coeff = 1.0;   // p0, watts per load-unit
  std::vector<double> max_power_dbm = {30.0};  // uniform when a single entry
  std::uint64_t rng_seed = 1;

  double channel_gain() const { return db_to_linear(channel_gain_db); }
  double noise_watts() const { return dbm_to_watts(noise_power_dbm); }
  double max_power_watts(std::size_t user) const;
  arma::vec max_power_watts_all() const;
};

struct SolverParams {
  double delta = 1e-6;    // forward-difference step
  double tau_bar = 1e-3;  // initial line-search step size
  double alpha = 0.5;     // step shrink factor, in (0,1)
  double xi = 0.1;        // Armijo sufficient-increase parameter, in (0,1)
  double epsilon = 1e-6;  // convergence threshold
  std::size_t t_max = 1000;  // gradient-ascent iteration cap
  std::size_t i_max = 100;   // alternating-optimization pass cap
  std::size_t b_max = 50;    // backtracking shrink cap per iteration
};

/// One linear piece of a computation-load function: slope * rho + intercept
/// on (lower, upper], where upper is the previous segment's lower breakpoint
/// (1.0 for the first segment). The last segment is closed at both ends.
struct LoadSegment {
  double slope = 0.0;      // A_s < 0
  double intercept = 0.0;  // B_s > 0
  double lower = 0.0;      // L_s
};

/// Per-user piecewise-linear computation load g_n(rho), segments ordered from
/// rho = 1 downward with strictly decreasing breakpoints.
struct PiecewiseLoad {
  std::vector<std::vector<LoadSegment>> users;

  std::size_t num_users() const { return users.size(); }
  std::size_t num_segments(std::size_t user) const { return users[user].size(); }
  double upper_bound(std::size_t user, std::size_t segment) const;
  double lower_bound(std::size_t user, std::size_t segment) const;
  /// Lower end of the load's domain; identical to the last breakpoint.
  double rho_min(std::size_t user) const;
};

/// Documented default load model: four segments per user whose slope
/// magnitude grows as rho shrinks, continuous at the breakpoints, scaled per
/// user so that g(rho_min) * p0 = 1.2 * p_max.
PiecewiseLoad default_piecewise_load(const NetworkConfig& config);

/// A full solution of the allocation problem.
struct Allocation {
  arma::cx_mat beamforming;       // W: num_antennas x num_users
  arma::vec transmit_power;       // watts, >= 0
  arma::vec rho;                  // semantic compression ratios
  std::vector<arma::uvec> theta;  // one-hot segment selection per user
  double objective = 0.0;         // sum of equivalent rates, bits/s/Hz
};

/// Index of the selected segment for each user (the 1 in each theta row).
std::vector<std::size_t> selected_segments(const Allocation& allocation);

struct Bundle {
  NetworkConfig config;
  PiecewiseLoad load;
  SolverParams solver;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Checks every structural invariant of the bundle. A violation of the
/// budget-exhaustion assumption g(rho_min) * p0 >= p_max is reported as a
/// warning, not an error: the solver still runs, only the budget-tightness
/// guarantee of the rough search loses its premise.
ValidationReport validate(const NetworkConfig& config, const PiecewiseLoad& load,
                          const SolverParams& params);
ValidationReport validate(const Bundle& bundle);

/// validate(), throwing ValidationError when any error is present.
void ensure_valid(const NetworkConfig& config, const PiecewiseLoad& load,
                  const SolverParams& params);
void ensure_valid(const Bundle& bundle);

}  // namespace psc
