#include <CLI11.hpp>

#include "psc/channel.hpp"
#include "psc/config_io.hpp"
#include "psc/experiments.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;

void print_report(const psc::ValidationReport& report) {
  for (const auto& warning : report.warnings) std::cerr << "warning: " << warning << "\n";
  for (const auto& error : report.errors) std::cerr << "error: " << error << "\n";
}

psc::Bundle load_validated(const std::string& config_path, std::uint64_t* seed_override) {
  psc::Bundle bundle = psc::load_config_file(config_path);
  if (seed_override != nullptr) bundle.config.rng_seed = *seed_override;
  const auto report = psc::validate(bundle);
  print_report(report);
  if (!report.ok()) throw psc::ValidationError(report.errors);
  return bundle;
}

int run_command(const std::string& config_path, const std::string& scheme_str,
                std::uint64_t* seed_override, const std::string& out_path,
                const std::string& trace_path) {
  const auto scheme = psc::scheme_from_name(scheme_str);
  if (!scheme) {
    std::cerr << "error: unknown scheme '" << scheme_str
              << "' (expected psc, psc-s2, psc-zf, or non-semantic)\n";
    return kExitValidation;
  }
  const psc::Bundle bundle = load_validated(config_path, seed_override);

  psc::RngStream stream(bundle.config.rng_seed, 0);
  const psc::ChannelMatrix h = psc::sample_channel(bundle.config, stream);
  const psc::RunRecord record = psc::run_scheme(*scheme, h, bundle);

  psc::write_run_csv(record, out_path);
  if (!trace_path.empty()) psc::emit_trace(record, trace_path);
  return kExitOk;
}

int sweep_command(const std::string& config_path, const std::string& param_str,
                  const std::vector<double>& values, std::size_t trials,
                  const std::vector<std::string>& scheme_strs, std::uint64_t* seed_override,
                  const std::string& out_path) {
  const auto parameter = psc::sweep_param_from_name(param_str);
  if (!parameter) {
    std::cerr << "error: unknown sweep parameter '" << param_str
              << "' (expected num_users, noise_power_dbm, comp_power_coeff, or max_power_dbm)\n";
    return kExitValidation;
  }
  psc::SweepSpec spec;
  spec.parameter = *parameter;
  spec.values = values;
  spec.trials = trials;
  for (const auto& name : scheme_strs) {
    const auto scheme = psc::scheme_from_name(name);
    if (!scheme) {
      std::cerr << "error: unknown scheme '" << name << "'\n";
      return kExitValidation;
    }
    spec.schemes.push_back(*scheme);
  }

  const psc::Bundle bundle = load_validated(config_path, seed_override);
  const psc::SweepResult result = psc::run_sweep(spec, bundle);

  for (const auto& error : result.errors)
    std::cerr << "trial error: value=" << error.value
              << " scheme=" << psc::scheme_name(error.scheme) << " trial=" << error.trial
              << " kind=" << error.kind << " (" << error.message << ")\n";
  psc::write_sweep_csv(result, out_path);

  std::size_t failures = 0;
  for (const auto& row : result.rows) failures += row.errors;
  if (failures == spec.values.size() * spec.schemes.size() * spec.trials) {
    std::cerr << "error: every trial of the sweep failed\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint transmission/computation resource allocation for multi-user "
               "probabilistic semantic communication"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scheme_str = "psc";
  std::string out_path;
  std::string trace_path;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Solve one channel draw with one scheme");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--scheme", scheme_str, "psc | psc-s2 | psc-zf | non-semantic")->required();
  auto* run_seed = run->add_option("--seed", seed, "Master RNG seed (overrides the config)");
  run->add_option("--out", out_path, "Per-user allocation CSV")->required();
  run->add_option("--trace", trace_path, "Optional per-iteration trace CSV");

  std::string param_str;
  std::vector<double> values;
  std::vector<std::string> scheme_strs;
  std::size_t trials = 50;

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over one parameter");
  sweep->add_option("--config", config_path, "Configuration file")->required();
  sweep->add_option("--param", param_str,
                    "num_users | noise_power_dbm | comp_power_coeff | max_power_dbm")
      ->required();
  sweep->add_option("--values", values, "Comma-separated list of swept values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--trials", trials, "Channel draws per value");
  sweep->add_option("--schemes", scheme_strs, "Comma-separated list of schemes")
      ->required()
      ->delimiter(',');
  auto* sweep_seed = sweep->add_option("--seed", seed, "Master RNG seed (overrides the config)");
  sweep->add_option("--out", out_path, "Aggregated sweep CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, scheme_str, run_seed->count() > 0 ? &seed : nullptr,
                         out_path, trace_path);
    }
    return sweep_command(config_path, param_str, values, trials, scheme_strs,
                         sweep_seed->count() > 0 ? &seed : nullptr, out_path);
  } catch (const psc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const psc::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const psc::SingularMatrixError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
