#include "treatval/runner.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>

#include "treatval/errors.hpp"

namespace treatval {

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string ci_level_label(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", 100.0 * (1.0 - alpha));
  return buf;
}

void print_baseline_lines(std::ostream& out, const std::string& name, double est,
                          double p, const std::pair<double, double>& ci, double alpha,
                          const std::string& trailer = "") {
  out << name << " observed_est = " << fixed3(est) << ", p val = " << fixed3(p)
      << ",\n";
  out << "  " << ci_level_label(alpha) << "% CI = [" << fixed3(ci.first) << ", "
      << fixed3(ci.second) << "]" << trailer << "\n";
}

nlohmann::json baseline_json(double est, double p, const std::pair<double, double>& ci) {
  return nlohmann::json{{"est", est}, {"p", p}, {"ci", {ci.first, ci.second}}};
}

void write_samples_csv(const std::string& path, const BootstrapResult& result) {
  std::ofstream file(path);
  if (!file) {
    throw input_error("cannot write samples to '" + path + "'");
  }
  file << "i_random,i_best\n";
  char buf[96];
  for (std::size_t i = 0; i < result.samples_random.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", result.samples_random[i],
                  result.samples_best[i]);
    file << buf;
  }
}

std::string with_n_suffix(const std::string& path, int n) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  const std::string tag = "_n" + std::to_string(n);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + tag;
  }
  return path.substr(0, dot) + tag + path.substr(dot);
}

void check_common(const RunConfig& config) {
  if (config.k_folds < 2) throw input_error("--k-folds must be at least 2");
  if (config.b_replicates < 1) throw input_error("--b must be at least 1");
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
    throw input_error("--alpha must lie strictly between 0 and 1");
  }
  if (config.workers < 1) throw input_error("--workers must be at least 1");
}

ModelSpec assemble_spec(const RunConfig& config) {
  ModelSpec spec;
  if (!config.model_spec_path.empty()) {
    std::ifstream file(config.model_spec_path);
    if (!file) {
      throw input_error("cannot open model spec '" + config.model_spec_path + "'");
    }
    nlohmann::json j;
    try {
      file >> j;
    } catch (const nlohmann::json::exception& e) {
      throw input_error("bad model spec JSON: " + std::string(e.what()));
    }
    spec = model_spec_from_json(j);
  } else {
    if (config.main_covariates.empty()) {
      throw input_error("provide --model-spec or --main with covariate names");
    }
    spec.main_covariates = config.main_covariates;
    spec.interaction_covariates = config.interaction_covariates;
    spec.response_direction = config.direction;
  }
  return spec;
}

BootstrapOptions bootstrap_options(const RunConfig& config, std::uint64_t seed,
                                   std::ostream* warn) {
  BootstrapOptions options;
  options.K = config.k_folds;
  options.B = config.b_replicates;
  options.alpha = config.alpha;
  options.seed = seed;
  options.workers = config.workers;
  options.best_from_training_folds = config.best_from_training_folds;
  options.warn = warn;
  return options;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const input_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const estimation_error& e) {
    err << "estimation aborted: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int run_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    check_common(config);
    if (config.input_path.empty()) {
      throw input_error("--input is required for evaluate");
    }
    ModelSpec spec = assemble_spec(config);
    if (!config.model_spec_path.empty() && config.direction_explicit) {
      // an explicit --direction flag wins over the file's direction
      spec.response_direction = config.direction;
    }
    const RctDataset data =
        load_csv(config.input_path, config.treatment_col, config.response_col);
    const BootstrapResult result =
        bootstrap_inference(data, spec, bootstrap_options(config, config.seed, &err));

    if (!config.emit_samples_path.empty()) {
      write_samples_csv(config.emit_samples_path, result);
    }

    if (config.format == OutputFormat::json) {
      nlohmann::json report{
          {"i_random", baseline_json(result.observed.i_random, result.p_random,
                                     result.ci_random)},
          {"i_best",
           baseline_json(result.observed.i_best, result.p_best, result.ci_best)},
          {"B", result.B},
          {"alpha", result.alpha},
          {"K", config.k_folds},
          {"seed", config.seed},
          {"redraws", result.redraw_count}};
      out << report.dump(2) << "\n";
    } else {
      print_baseline_lines(out, "I_random", result.observed.i_random, result.p_random,
                           result.ci_random, result.alpha);
      print_baseline_lines(out, "I_best", result.observed.i_best, result.p_best,
                           result.ci_best, result.alpha);
    }
    return 0;
  });
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    check_common(config);
    if (config.direction == Direction::lower_is_better) {
      throw input_error(
          "the synthetic scenarios are defined with higher-is-better "
          "responses; --direction lower does not apply to simulate");
    }
    std::vector<int> n_list = config.n_list;
    if (n_list.empty()) n_list = {1000};

    ModelSpec spec;
    spec.main_covariates = {"x"};
    spec.interaction_covariates = {"x"};
    spec.response_direction = Direction::higher_is_better;

    // The target of estimation: the improvement of the plug-in rule from the
    // working model, plus (complex only) the optimal rule's improvement the
    // intervals are expected to miss.
    double mu_truth = 0.0;
    double mu_optimal = 0.0;
    std::string method;
    McOptions mc;
    mc.workers = config.workers;
    if (config.scenario == Scenario::simple) {
      const SimpleDgpParams& p = config.simple_params;
      if (p.gamma1 > 0.0) {
        mu_truth = analytic_improvement_simple(p);
        method = "analytic";
      } else {
        Rng oracle_rng = derive_stream(config.seed, 0x0AC1E);
        mu_truth = p.gamma1 == 0.0
                       ? 0.0
                       : mc_improvement(p, OracleRule::optimal_under_dgp,
                                        config.oracle_draws, oracle_rng, mc);
        method = p.gamma1 == 0.0 ? "exact" : "monte-carlo";
      }
    } else {
      Rng oracle_rng = derive_stream(config.seed, 0x0AC1E);
      mu_truth = mc_improvement(config.complex_params, OracleRule::fitted_approximation,
                                config.oracle_draws, oracle_rng, mc);
      mu_optimal = mc_improvement(config.complex_params, OracleRule::optimal_under_dgp,
                                  config.oracle_draws, oracle_rng, mc);
      method = "monte-carlo";
    }

    nlohmann::json runs = nlohmann::json::array();
    const bool json_format = config.format == OutputFormat::json;
    for (int n : n_list) {
      if (n < 4) throw input_error("--n must be at least 4");
      Rng gen_rng = derive_stream(config.seed, stream_tag::generate,
                                  static_cast<std::uint64_t>(n));
      const RctDataset data =
          config.scenario == Scenario::simple
              ? generate_simple(config.simple_params, n, gen_rng)
              : generate_complex(config.complex_params, n, gen_rng);
      const std::uint64_t run_seed = derive_seed(config.seed, 0x5EED,
                                                 static_cast<std::uint64_t>(n));
      const BootstrapResult result =
          bootstrap_inference(data, spec, bootstrap_options(config, run_seed, &err));

      if (!config.emit_samples_path.empty()) {
        write_samples_csv(with_n_suffix(config.emit_samples_path, n), result);
      }

      auto covers = [&](const std::pair<double, double>& ci) {
        return ci.first <= mu_truth && mu_truth <= ci.second;
      };
      auto excludes_opt = [&](const std::pair<double, double>& ci) {
        return mu_optimal < ci.first || mu_optimal > ci.second;
      };

      if (json_format) {
        nlohmann::json run{
            {"n", n},
            {"i_random", baseline_json(result.observed.i_random, result.p_random,
                                       result.ci_random)},
            {"i_best",
             baseline_json(result.observed.i_best, result.p_best, result.ci_best)},
            {"redraws", result.redraw_count},
            {"oracle", {{"mu_improvement", mu_truth}, {"method", method}}},
            {"covers_truth",
             {{"i_random", covers(result.ci_random)},
              {"i_best", covers(result.ci_best)}}}};
        if (config.scenario == Scenario::complex) {
          run["oracle"]["mu_optimal"] = mu_optimal;
          run["excludes_optimal"] = {{"i_random", excludes_opt(result.ci_random)},
                                     {"i_best", excludes_opt(result.ci_best)}};
        }
        runs.push_back(std::move(run));
      } else {
        out << "scenario = "
            << (config.scenario == Scenario::simple ? "simple" : "complex")
            << ", n = " << n << ", K = " << config.k_folds << ", B = "
            << config.b_replicates << ", seed = " << config.seed << "\n";
        out << "oracle: mu_improvement = " << fixed3(mu_truth) << " (" << method << ")";
        if (config.scenario == Scenario::complex) {
          out << ", mu_optimal = " << fixed3(mu_optimal);
        }
        out << "\n";
        auto trailer = [&](const std::pair<double, double>& ci) {
          std::string t = "  covers truth (" + fixed3(mu_truth) + "): " +
                          (covers(ci) ? "yes" : "no");
          if (config.scenario == Scenario::complex) {
            t += excludes_opt(ci) ? ", excludes optimal" : ", contains optimal";
          }
          return t;
        };
        print_baseline_lines(out, "I_random", result.observed.i_random,
                             result.p_random, result.ci_random, result.alpha,
                             trailer(result.ci_random));
        print_baseline_lines(out, "I_best", result.observed.i_best, result.p_best,
                             result.ci_best, result.alpha, trailer(result.ci_best));
        out << "\n";
      }
    }

    if (json_format) {
      nlohmann::json report{
          {"scenario", config.scenario == Scenario::simple ? "simple" : "complex"},
          {"B", config.b_replicates},
          {"K", config.k_folds},
          {"alpha", config.alpha},
          {"seed", config.seed},
          {"runs", runs}};
      out << report.dump(2) << "\n";
    }
    return 0;
  });
}

}  // namespace treatval
