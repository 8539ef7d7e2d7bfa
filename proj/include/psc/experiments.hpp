#pragma once

#include "psc/channel.hpp"
#include "psc/model.hpp"
#include "psc/optimizer.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace psc {

/// Schemes compared in the experiments:
///  - Psc          full three-stage pipeline with MMSE recomputation,
///  - PscS2        stops after the rough search, reports the midpoint result,
///  - PscZf        three stages with a fixed zero-forcing beamformer,
///  - NonSemantic  no compression, the whole budget goes to transmission.
enum class Scheme { Psc, PscS2, PscZf, NonSemantic };

std::string scheme_name(Scheme scheme);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct RunRecord {
  Scheme scheme = Scheme::Psc;
  double objective = 0.0;
  arma::vec transmit_power;
  arma::vec computation_power;
  arma::vec rho;
  arma::vec max_power;  // per-user budget, watts
  StageTrace trace;
};

RunRecord run_scheme(Scheme scheme, const ChannelMatrix& h, const Bundle& bundle);

enum class SweepParam { NumUsers, NoisePowerDbm, CompPowerCoeff, MaxPowerDbm };

std::string sweep_param_name(SweepParam parameter);
std::optional<SweepParam> sweep_param_from_name(const std::string& name);

/// The base bundle with one parameter replaced by the swept value. Sweeping
/// num_users below the base truncates the load to the first users.
Bundle apply_sweep_value(const Bundle& base, SweepParam parameter, double value);

struct SweepSpec {
  SweepParam parameter = SweepParam::NoisePowerDbm;
  std::vector<double> values;
  std::size_t trials = 50;
  std::vector<Scheme> schemes;
};

struct SweepRow {
  SweepParam parameter = SweepParam::NoisePowerDbm;
  double value = 0.0;
  Scheme scheme = Scheme::Psc;
  std::size_t trials = 0;
  double mean_objective = 0.0;  // NaN when every trial failed
  double std_objective = 0.0;
  std::size_t errors = 0;
};

struct TrialError {
  double value = 0.0;
  Scheme scheme = Scheme::Psc;
  std::size_t trial = 0;
  std::string kind;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<TrialError> errors;
};

/// Monte-Carlo sweep: for every (value, scheme) pair, `trials` independent
/// channel draws with streams derived from (config seed, trial index). The
/// same draw feeds every scheme of a trial, failures become error counts, and
/// aggregation order is fixed, so the output is deterministic.
SweepResult run_sweep(const SweepSpec& spec, const Bundle& base);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_sweep_csv(const SweepResult& result, const std::string& path);

/// Per-iteration trace CSV: stage,iteration,objective,tau,backtracks.
void emit_trace(const RunRecord& record, std::ostream& out);
void emit_trace(const RunRecord& record, const std::string& path);

/// Per-user allocation CSV for a single run.
void write_run_csv(const RunRecord& record, std::ostream& out);
void write_run_csv(const RunRecord& record, const std::string& path);

struct PowerSplitRow {
  Scheme scheme = Scheme::Psc;
  std::size_t user = 0;
  double transmit_power = 0.0;
  double computation_power = 0.0;
  double total = 0.0;
  double budget = 0.0;
  bool within_budget = false;  // |total - budget| <= 1e-9
};

std::vector<PowerSplitRow> power_split_report(const std::vector<RunRecord>& records);
void write_power_split_csv(const std::vector<PowerSplitRow>& rows, std::ostream& out);
void write_power_split_csv(const std::vector<PowerSplitRow>& rows, const std::string& path);

}  // namespace psc
