#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "treatval/runner.hpp"

namespace {

using treatval::Direction;
using treatval::OutputFormat;
using treatval::RunConfig;
using treatval::Scenario;

void add_shared_flags(CLI::App* cmd, RunConfig& config, std::string& direction,
                      std::string& format) {
  cmd->add_option("--k-folds", config.k_folds, "Cross-validation folds")
      ->capture_default_str();
  cmd->add_option("--b", config.b_replicates, "Bootstrap replicates")
      ->capture_default_str();
  cmd->add_option("--alpha", config.alpha, "Two-sided CI miss probability")
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  cmd->add_option("--workers", config.workers, "Parallel bootstrap workers")
      ->capture_default_str();
  cmd->add_option("--direction", direction, "Whether higher or lower responses are better")
      ->check(CLI::IsMember({"higher", "lower"}));
  cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_option("--emit-samples", config.emit_samples_path,
                  "Write raw bootstrap samples to this CSV path");
  cmd->add_flag("--best-from-training-folds", config.best_from_training_folds,
                "Estimate the best baseline on each training fold instead of "
                "test-set arm means");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Estimates how much a model-based personalized treatment allocation rule "
      "improves outcomes over business-as-usual allocation, from two-arm RCT "
      "data, with bootstrap confidence intervals and one-sided tests."};
  app.require_subcommand(1);

  RunConfig config;
  std::string direction = "higher";
  std::string format = "text";
  std::string scenario = "simple";

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Analyze an RCT CSV with a pre-specified model");
  evaluate->add_option("--input", config.input_path, "RCT data CSV")->required();
  evaluate->add_option("--treatment-col", config.treatment_col, "Treatment column name")
      ->capture_default_str();
  evaluate->add_option("--response-col", config.response_col, "Response column name")
      ->capture_default_str();
  evaluate->add_option("--model-spec", config.model_spec_path,
                       "JSON file {main, interactions, direction}");
  evaluate->add_option("--main", config.main_covariates,
                       "Main-effect covariate names (inline model spec)")
      ->delimiter(',');
  evaluate->add_option("--interactions", config.interaction_covariates,
                       "Treatment-interaction covariate names")
      ->delimiter(',');
  add_shared_flags(evaluate, config, direction, format);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Rerun the synthetic studies with oracle checks");
  simulate->add_option("--scenario", scenario, "Data-generating process")
      ->check(CLI::IsMember({"simple", "complex"}))
      ->capture_default_str();
  simulate->add_option("--n", config.n_list, "Trial sizes (repeatable)")
      ->delimiter(',');
  simulate->add_option("--oracle-draws", config.oracle_draws,
                       "Monte Carlo draws for the truth values")
      ->capture_default_str();
  double beta0 = 0, beta1 = 0, beta2 = 0, gamma0 = 0, gamma1 = 0, gamma2 = 0;
  double mu_x = 0, sigma_x = 0, noise_sd = 0;
  auto* s = simulate;
  s->add_option("--beta0", beta0)->group("DGP overrides");
  s->add_option("--beta1", beta1)->group("DGP overrides");
  s->add_option("--beta2", beta2)->group("DGP overrides");
  s->add_option("--gamma0", gamma0)->group("DGP overrides");
  s->add_option("--gamma1", gamma1)->group("DGP overrides");
  s->add_option("--gamma2", gamma2)->group("DGP overrides");
  s->add_option("--mu-x", mu_x)->group("DGP overrides");
  s->add_option("--sigma-x", sigma_x)->group("DGP overrides");
  s->add_option("--noise-sd", noise_sd)->group("DGP overrides");
  add_shared_flags(simulate, config, direction, format);

  CLI11_PARSE(app, argc, argv);

  config.direction =
      direction == "lower" ? Direction::lower_is_better : Direction::higher_is_better;
  config.format = format == "json" ? OutputFormat::json : OutputFormat::text;
  config.scenario = scenario == "complex" ? Scenario::complex : Scenario::simple;

  if (evaluate->parsed()) {
    config.command = RunConfig::Command::evaluate;
    config.direction_explicit = evaluate->count("--direction") > 0;
    return treatval::run_evaluate(config, std::cout, std::cerr);
  }
  config.command = RunConfig::Command::simulate;
  // scenarios have different defaults, so apply only flags actually given
  auto set = [&](const char* flag, double value, auto... fields) {
    if (simulate->count(flag) > 0) ((*fields = value), ...);
  };
  set("--beta0", beta0, &config.simple_params.beta0, &config.complex_params.beta0);
  set("--beta1", beta1, &config.simple_params.beta1, &config.complex_params.beta1);
  set("--beta2", beta2, &config.complex_params.beta2);
  set("--gamma0", gamma0, &config.simple_params.gamma0, &config.complex_params.gamma0);
  set("--gamma1", gamma1, &config.simple_params.gamma1, &config.complex_params.gamma1);
  set("--gamma2", gamma2, &config.complex_params.gamma2);
  set("--mu-x", mu_x, &config.simple_params.mu_x);
  set("--sigma-x", sigma_x, &config.simple_params.sigma_x);
  set("--noise-sd", noise_sd, &config.simple_params.noise_sd,
      &config.complex_params.noise_sd);
  return treatval::run_simulate(config, std::cout, std::cerr);
}
