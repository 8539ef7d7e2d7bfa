#include "psc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace psc {

namespace {

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string stage_name(StageTag tag) {
  switch (tag) {
    case StageTag::AO: return "AO";
    case StageTag::GA: return "GA";
    case StageTag::Final: return "final";
  }
  return "?";
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
  if (dynamic_cast<const SingularMatrixError*>(&e)) return "singular";
  if (dynamic_cast<const UndefinedSinrError*>(&e)) return "sinr";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: '" + path + "'");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("failed writing output file: '" + path + "'");
}

arma::vec committed_computation_power(const PiecewiseLoad& load, const SegmentChoice& segments,
                                      const arma::vec& rho, double p0) {
  arma::vec pc(rho.n_elem);
  for (arma::uword n = 0; n < rho.n_elem; ++n) {
    const auto& seg = load.users[n][segments[n]];
    pc(n) = (seg.slope * rho(n) + seg.intercept) * p0;
  }
  return pc;
}

}  // namespace

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Psc: return "psc";
    case Scheme::PscS2: return "psc-s2";
    case Scheme::PscZf: return "psc-zf";
    case Scheme::NonSemantic: return "non-semantic";
  }
  return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  if (name == "psc") return Scheme::Psc;
  if (name == "psc-s2") return Scheme::PscS2;
  if (name == "psc-zf") return Scheme::PscZf;
  if (name == "non-semantic") return Scheme::NonSemantic;
  return std::nullopt;
}

std::string sweep_param_name(SweepParam parameter) {
  switch (parameter) {
    case SweepParam::NumUsers: return "num_users";
    case SweepParam::NoisePowerDbm: return "noise_power_dbm";
    case SweepParam::CompPowerCoeff: return "comp_power_coeff";
    case SweepParam::MaxPowerDbm: return "max_power_dbm";
  }
  return "?";
}

std::optional<SweepParam> sweep_param_from_name(const std::string& name) {
  if (name == "num_users") return SweepParam::NumUsers;
  if (name == "noise_power_dbm") return SweepParam::NoisePowerDbm;
  if (name == "comp_power_coeff") return SweepParam::CompPowerCoeff;
  if (name == "max_power_dbm") return SweepParam::MaxPowerDbm;
  return std::nullopt;
}

RunRecord run_scheme(Scheme scheme, const ChannelMatrix& h, const Bundle& bundle) {
  const NetworkConfig& config = bundle.config;
  const double sigma2 = config.noise_watts();
  const arma::vec pmax = config.max_power_watts_all();

  RunRecord record;
  record.scheme = scheme;
  record.max_power = pmax;

  switch (scheme) {
    case Scheme::Psc:
    case Scheme::PscZf: {
      const BeamformerPolicy policy =
          scheme == Scheme::Psc ? BeamformerPolicy::mmse() : BeamformerPolicy::zf();
      SolveResult result = run_three_stage(h, config, bundle.load, bundle.solver, policy);
      record.objective = result.allocation.objective;
      record.transmit_power = result.allocation.transmit_power;
      record.rho = result.allocation.rho;
      record.computation_power = committed_computation_power(
          bundle.load, result.segments, result.allocation.rho, config.comp_power_coeff);
      record.trace = std::move(result.trace);
      break;
    }
    case Scheme::PscS2: {
      const BeamformerPolicy policy = BeamformerPolicy::mmse();
      Stage2Result rough = stage2_ao(h, config, bundle.load, bundle.solver, policy);
      record.rho = segment_midpoints(bundle.load, rough.segments);
      record.computation_power = committed_computation_power(
          bundle.load, rough.segments, record.rho, config.comp_power_coeff);
      record.transmit_power = arma::clamp(pmax - record.computation_power, 0.0,
                                          std::numeric_limits<double>::infinity());
      record.objective = rough.trace.back().objective;
      record.trace = std::move(rough.trace);
      break;
    }
    case Scheme::NonSemantic: {
      const arma::cx_mat w = mmse_matrix(h, pmax, sigma2);
      const arma::vec gamma = sinr(w, h, pmax, sigma2);
      record.objective = arma::accu(achievable_rate(gamma));
      record.transmit_power = pmax;
      record.computation_power = arma::vec(config.num_users, arma::fill::zeros);
      record.rho = arma::vec(config.num_users, arma::fill::ones);
      record.trace = {{StageTag::Final, 0, record.objective, record.rho, 0.0, 0}};
      break;
    }
  }
  return record;
}

Bundle apply_sweep_value(const Bundle& base, SweepParam parameter, double value) {
  Bundle out = base;
  switch (parameter) {
    case SweepParam::NumUsers: {
      if (!(value >= 1.0) || value != std::floor(value))
        throw ValidationError({"num_users sweep value must be a positive integer"});
      const auto n = static_cast<std::size_t>(value);
      out.config.num_users = n;
      if (out.load.num_users() > n) out.load.users.resize(n);
      if (out.config.max_power_dbm.size() > 1 && out.config.max_power_dbm.size() > n)
        out.config.max_power_dbm.resize(n);
      break;
    }
    case SweepParam::NoisePowerDbm:
      out.config.noise_power_dbm = value;
      break;
    case SweepParam::CompPowerCoeff:
      out.config.comp_power_coeff = value;
      break;
    case SweepParam::MaxPowerDbm:
      out.config.max_power_dbm = {value};
      break;
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, const Bundle& base) {
  std::vector<std::string> issues;
  if (spec.values.empty()) issues.push_back("sweep needs at least one value");
  if (spec.schemes.empty()) issues.push_back("sweep needs at least one scheme");
  if (spec.trials == 0) issues.push_back("sweep needs trials >= 1");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  SweepResult result;
  for (const double value : spec.values) {
    Bundle bundle;
    std::string setup_error;
    try {
      bundle = apply_sweep_value(base, spec.parameter, value);
      ensure_valid(bundle);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    std::vector<std::vector<double>> successes(spec.schemes.size());
    std::vector<std::size_t> failures(spec.schemes.size(), 0);

    if (!setup_error.empty()) {
      for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
        failures[si] = spec.trials;
        for (std::size_t trial = 0; trial < spec.trials; ++trial)
          result.errors.push_back({value, spec.schemes[si], trial, "validation", setup_error});
      }
    } else {
      for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        RngStream stream(bundle.config.rng_seed, trial);
        const ChannelMatrix h = sample_channel(bundle.config, stream);
        for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
          try {
            successes[si].push_back(run_scheme(spec.schemes[si], h, bundle).objective);
          } catch (const std::exception& e) {
            ++failures[si];
            result.errors.push_back(
                {value, spec.schemes[si], trial, error_kind(e), e.what()});
          }
        }
      }
    }

    for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
      const auto& xs = successes[si];
      double mean = std::numeric_limits<double>::quiet_NaN();
      double stddev = std::numeric_limits<double>::quiet_NaN();
      if (!xs.empty()) {
        double sum = 0.0;
        for (double x : xs) sum += x;
        mean = sum / static_cast<double>(xs.size());
        if (xs.size() == 1) {
          stddev = 0.0;
        } else {
          double ss = 0.0;
          for (double x : xs) ss += (x - mean) * (x - mean);
          stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        }
      }
      result.rows.push_back(
          {spec.parameter, value, spec.schemes[si], spec.trials, mean, stddev, failures[si]});
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "param,value,scheme,trials,mean_objective,std_objective,errors\n";
  for (const auto& row : result.rows)
    out << sweep_param_name(row.parameter) << ',' << fmt(row.value) << ','
        << scheme_name(row.scheme) << ',' << row.trials << ',' << fmt(row.mean_objective) << ','
        << fmt(row.std_objective) << ',' << row.errors << '\n';
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  auto out = open_output(path);
  write_sweep_csv(result, out);
  finish_output(out, path);
}

void emit_trace(const RunRecord& record, std::ostream& out) {
  out << "stage,iteration,objective,tau,backtracks\n";
  for (const auto& entry : record.trace) {
    out << stage_name(entry.stage) << ',' << entry.iteration << ',' << fmt(entry.objective)
        << ',';
    if (entry.stage == StageTag::GA && entry.iteration > 0) out << fmt(entry.tau);
    out << ',' << entry.backtracks << '\n';
  }
}

void emit_trace(const RunRecord& record, const std::string& path) {
  auto out = open_output(path);
  emit_trace(record, out);
  finish_output(out, path);
}

void write_run_csv(const RunRecord& record, std::ostream& out) {
  out << "scheme,user,rho,p_transmit,p_compute,p_total,objective\n";
  for (arma::uword n = 0; n < record.rho.n_elem; ++n) {
    const double total = record.transmit_power(n) + record.computation_power(n);
    out << scheme_name(record.scheme) << ',' << (n + 1) << ',' << fmt(record.rho(n)) << ','
        << fmt(record.transmit_power(n)) << ',' << fmt(record.computation_power(n)) << ','
        << fmt(total) << ',' << fmt(record.objective) << '\n';
  }
}

void write_run_csv(const RunRecord& record, const std::string& path) {
  auto out = open_output(path);
  write_run_csv(record, out);
  finish_output(out, path);
}

std::vector<PowerSplitRow> power_split_report(const std::vector<RunRecord>& records) {
  std::vector<PowerSplitRow> rows;
  for (const auto& record : records) {
    for (arma::uword n = 0; n < record.rho.n_elem; ++n) {
      PowerSplitRow row;
      row.scheme = record.scheme;
      row.user = n;
      row.transmit_power = record.transmit_power(n);
      row.computation_power = record.computation_power(n);
      row.total = row.transmit_power + row.computation_power;
      row.budget = record.max_power(n);
      row.within_budget = std::abs(row.total - row.budget) <= 1e-9;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_power_split_csv(const std::vector<PowerSplitRow>& rows, std::ostream& out) {
  out << "scheme,user,p_transmit,p_compute,p_total,p_max,within_budget\n";
  for (const auto& row : rows)
    out << scheme_name(row.scheme) << ',' << (row.user + 1) << ',' << fmt(row.transmit_power)
        << ',' << fmt(row.computation_power) << ',' << fmt(row.total) << ',' << fmt(row.budget)
        << ',' << (row.within_budget ? 1 : 0) << '\n';
}

void write_power_split_csv(const std::vector<PowerSplitRow>& rows, const std::string& path) {
  auto out = open_output(path);
  write_power_split_csv(rows, out);
  finish_output(out, path);
}

}  // namespace psc
