#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "treatval/inference.hpp"
#include "treatval/simulation.hpp"

namespace treatval {

enum class OutputFormat { text, json };
enum class Scenario { simple, complex };

// Everything either CLI command needs, defaults matching the flags.
struct RunConfig {
  enum class Command { evaluate, simulate } command = Command::evaluate;

  // evaluate
  std::string input_path;
  std::string treatment_col = "treatment";
  std::string response_col = "y";
  std::string model_spec_path;                  // JSON {main, interactions, direction}
  std::vector<std::string> main_covariates;     // inline alternative
  std::vector<std::string> interaction_covariates;
  Direction direction = Direction::higher_is_better;
  bool direction_explicit = false;  // --direction given, overrides the spec file

  int k_folds = 10;
  int b_replicates = 3000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int workers = 1;
  OutputFormat format = OutputFormat::text;
  bool best_from_training_folds = false;
  std::string emit_samples_path;

  // simulate
  Scenario scenario = Scenario::simple;
  std::vector<int> n_list;
  SimpleDgpParams simple_params = SimpleDgpParams::paper();
  ComplexDgpParams complex_params = ComplexDgpParams::paper();
  std::int64_t oracle_draws = 2'000'000;
};

// Exit codes shared by both commands: 0 success, 2 invalid input,
// 3 estimation abort. Reports go to `out`, diagnostics to `err`.
int run_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace treatval
