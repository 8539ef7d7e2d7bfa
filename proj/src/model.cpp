#include "psc/model.hpp"

#include <cmath>
#include <sstream>

namespace psc {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1e3); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double gain) { return 10.0 * std::log10(gain); }

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "validation failed:";
  for (const auto& issue : issues) out << "\n  - " << issue;
  return out.str();
}

std::string user_list(const std::vector<std::size_t>& users) {
  std::ostringstream out;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (i > 0) out << ", ";
    out << users[i];
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues_in)
    : Error(join_issues(issues_in)), issues(std::move(issues_in)) {}

InfeasibleError::InfeasibleError(const std::string& what, std::vector<std::size_t> users_in)
    : Error(what + " (users: " + user_list(users_in) + ")"), users(std::move(users_in)) {}

double NetworkConfig::max_power_watts(std::size_t user) const {
  if (max_power_dbm.empty()) throw DomainError("max_power_dbm is empty");
  const double dbm = max_power_dbm.size() == 1 ? max_power_dbm.front() : max_power_dbm.at(user);
  return dbm_to_watts(dbm);
}

arma::vec NetworkConfig::max_power_watts_all() const {
  arma::vec out(num_users);
  for (std::size_t n = 0; n < num_users; ++n) out(n) = max_power_watts(n);
  return out;
}

double PiecewiseLoad::upper_bound(std::size_t user, std::size_t segment) const {
  return segment == 0 ? 1.0 : users[user][segment - 1].lower;
}

double PiecewiseLoad::lower_bound(std::size_t user, std::size_t segment) const {
  return users[user][segment].lower;
}

double PiecewiseLoad::rho_min(std::size_t user) const {
  return users[user].back().lower;
}

PiecewiseLoad default_piecewise_load(const NetworkConfig& config) {
  if (!(config.comp_power_coeff > 0.0))
    throw DomainError("default load generation requires comp_power_coeff > 0");

  // Shape: slope magnitude grows as rho shrinks, continuous at breakpoints,
  // starting from g(1) = 0.1.
  static constexpr double kBreakpoints[] = {0.75, 0.55, 0.35, 0.2};
  static constexpr double kSlopes[] = {-0.4, -1.2, -3.0, -8.0};
  static constexpr double kStartLoad = 0.1;
  static constexpr double kBudgetFactor = 1.2;  // g(rho_min) * p0 = 1.2 * p_max

  PiecewiseLoad load;
  load.users.resize(config.num_users);
  for (std::size_t n = 0; n < config.num_users; ++n) {
    std::vector<LoadSegment> segments(4);
    double value = kStartLoad;  // load at the upper end of the current segment
    double upper = 1.0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      segments[s].slope = kSlopes[s];
      segments[s].lower = kBreakpoints[s];
      segments[s].intercept = value - kSlopes[s] * upper;
      value = segments[s].slope * segments[s].lower + segments[s].intercept;
      upper = segments[s].lower;
    }
    const double scale =
        kBudgetFactor * config.max_power_watts(n) / (config.comp_power_coeff * value);
    for (auto& seg : segments) {
      seg.slope *= scale;
      seg.intercept *= scale;
    }
    load.users[n] = std::move(segments);
  }
  return load;
}

std::vector<std::size_t> selected_segments(const Allocation& allocation) {
  std::vector<std::size_t> out(allocation.theta.size());
  for (std::size_t n = 0; n < allocation.theta.size(); ++n) {
    const arma::uvec hits = arma::find(allocation.theta[n] == 1);
    if (hits.n_elem != 1 || arma::accu(allocation.theta[n]) != 1)
      throw DomainError("theta row " + std::to_string(n) + " is not one-hot");
    out[n] = hits(0);
  }
  return out;
}

ValidationReport validate(const NetworkConfig& config, const PiecewiseLoad& load,
                          const SolverParams& params) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.errors.push_back(msg); };
  auto warn = [&](const std::string& msg) { report.warnings.push_back(msg); };

  if (config.num_users == 0) fail("num_users must be >= 1");
  if (config.num_antennas == 0) fail("num_antennas must be >= 1");
  if (config.num_users > config.num_antennas)
    fail("num_users <= num_antennas violated (SDMA requires at least one antenna per user)");
  if (!std::isfinite(config.channel_gain_db)) fail("channel_gain_db must be finite");
  if (!std::isfinite(config.noise_power_dbm)) fail("noise_power_dbm must be finite");
  if (!(config.comp_power_coeff > 0.0) || !std::isfinite(config.comp_power_coeff))
    fail("comp_power_coeff must be positive and finite");
  if (config.max_power_dbm.empty()) {
    fail("max_power_dbm must hold one uniform value or one value per user");
  } else if (config.max_power_dbm.size() != 1 &&
             config.max_power_dbm.size() != config.num_users) {
    fail("max_power_dbm has " + std::to_string(config.max_power_dbm.size()) +
         " entries, expected 1 or num_users");
  } else {
    for (double dbm : config.max_power_dbm)
      if (!std::isfinite(dbm)) fail("max_power_dbm entries must be finite");
  }

  if (!(params.delta > 0.0)) fail("delta must be > 0");
  if (!(params.tau_bar > 0.0)) fail("tau_bar must be > 0");
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) fail("alpha must be in (0, 1)");
  if (!(params.xi > 0.0 && params.xi < 1.0)) fail("xi must be in (0, 1)");
  if (!(params.epsilon > 0.0)) fail("epsilon must be > 0");
  if (params.t_max == 0) fail("t_max must be >= 1");
  if (params.i_max == 0) fail("i_max must be >= 1");
  if (params.b_max == 0) fail("b_max must be >= 1");

  if (load.num_users() != config.num_users) {
    fail("load defines " + std::to_string(load.num_users()) + " users, config expects " +
         std::to_string(config.num_users));
    return report;  // per-user checks below would index out of range
  }

  for (std::size_t n = 0; n < load.num_users(); ++n) {
    const auto& segments = load.users[n];
    const std::string who = "user " + std::to_string(n);
    if (segments.empty()) {
      fail(who + ": load must have at least one segment");
      continue;
    }
    double prev_lower = 1.0;
    bool ordered = true;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto& seg = segments[s];
      const std::string where = who + " segment " + std::to_string(s);
      if (!(seg.slope < 0.0) || !std::isfinite(seg.slope))
        fail(where + ": slope must be negative");
      if (!(seg.intercept > 0.0) || !std::isfinite(seg.intercept))
        fail(where + ": intercept must be positive");
      if (!std::isfinite(seg.lower)) fail(where + ": breakpoint must be finite");
      if (!(seg.lower < prev_lower)) {
        fail(who + ": breakpoints not strictly decreasing at segment " + std::to_string(s));
        ordered = false;
      }
      prev_lower = seg.lower;
    }
    if (!(segments.back().lower > 0.0)) fail(who + ": rho_min must be positive");
    if (!ordered) continue;

    // Warn when the load drops across a breakpoint: g should be non-increasing
    // in rho, so the value entering the lower segment must not fall.
    for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
      const double at = segments[s].lower;
      const double from_upper = segments[s].slope * at + segments[s].intercept;
      const double from_lower = segments[s + 1].slope * at + segments[s + 1].intercept;
      if (from_lower < from_upper - 1e-12 * std::max(1.0, std::abs(from_upper)))
        warn(who + ": load decreases across breakpoint " + std::to_string(s) +
             " (g is not non-increasing in rho)");
    }

    // Budget-exhaustion assumption: g(rho_min) * p0 >= p_max.
    if (config.max_power_dbm.size() == 1 || config.max_power_dbm.size() == config.num_users) {
      const auto& last = segments.back();
      const double g_min = last.slope * last.lower + last.intercept;
      if (g_min * config.comp_power_coeff < config.max_power_watts(n))
        warn(who + ": g(rho_min) * p0 < p_max; full compression does not exhaust the power "
                   "budget, so budget tightness at the optimum is not guaranteed");
    }
  }

  return report;
}

ValidationReport validate(const Bundle& bundle) {
  return validate(bundle.config, bundle.load, bundle.solver);
}

void ensure_valid(const NetworkConfig& config, const PiecewiseLoad& load,
                  const SolverParams& params) {
  auto report = validate(config, load, params);
  if (!report.ok()) throw ValidationError(std::move(report.errors));
}

void ensure_valid(const Bundle& bundle) {
  ensure_valid(bundle.config, bundle.load, bundle.solver);
}

}  // namespace psc
