#include "treatval/simulation.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

#include "treatval/errors.hpp"
#include "treatval/linear_model.hpp"

namespace treatval {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / M_SQRT2); }

void check_even_size(Eigen::Index n) {
  if (n < 4 || n % 2 != 0) {
    throw input_error("simulated trials need an even n >= 4 (balanced arms); got " +
                      std::to_string(n));
  }
}

Eigen::VectorXi balanced_arms(Eigen::Index n, Rng& rng) {
  std::vector<int> arms(static_cast<std::size_t>(n), 0);
  std::fill(arms.begin() + static_cast<std::ptrdiff_t>(n / 2), arms.end(), 1);
  rng.shuffle(arms);
  Eigen::VectorXi a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = arms[static_cast<std::size_t>(i)];
  return a;
}

void check_simple(const SimpleDgpParams& p) {
  if (!(p.sigma_x > 0.0)) throw input_error("sigma_x must be positive");
  if (p.noise_sd < 0.0) throw input_error("noise_sd must be non-negative");
  if (!std::isfinite(p.beta0) || !std::isfinite(p.beta1) || !std::isfinite(p.gamma0) ||
      !std::isfinite(p.gamma1) || !std::isfinite(p.mu_x) || !std::isfinite(p.sigma_x)) {
    throw input_error("simple DGP parameters must be finite");
  }
}

void check_complex(const ComplexDgpParams& p) {
  if (p.noise_sd < 0.0) throw input_error("noise_sd must be non-negative");
}

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;  // Monte Carlo standard error
};

// Chunked deterministic Monte Carlo mean: chunk c draws from a stream derived
// from (root, c), partial sums are reduced in chunk order, so the result
// depends on (root, chunk_size) but not on the worker count.
McEstimate chunked_mc_mean(
    std::int64_t draws, std::uint64_t root, const McOptions& options,
    const std::function<void(Rng&, std::int64_t, double&, double&)>& chunk_sums) {
  if (draws < 1) throw input_error("draws must be at least 1");
  const std::int64_t chunk_size = std::max<std::int64_t>(1, options.chunk_size);
  const std::int64_t chunks = (draws + chunk_size - 1) / chunk_size;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  std::vector<double> partial_sq(static_cast<std::size_t>(chunks), 0.0);

  auto run_chunk = [&](std::int64_t c) {
    Rng rng = derive_stream(root, stream_tag::mc_chunk, static_cast<std::uint64_t>(c));
    const std::int64_t lo = c * chunk_size;
    const std::int64_t count = std::min(chunk_size, draws - lo);
    chunk_sums(rng, count, partial[static_cast<std::size_t>(c)],
               partial_sq[static_cast<std::size_t>(c)]);
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1 || chunks == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::int64_t> next{0};
    auto loop = [&] {
      for (;;) {
        const std::int64_t c = next.fetch_add(1);
        if (c >= chunks) return;
        run_chunk(c);
      }
    };
    std::vector<std::thread> pool;
    const int thread_count = static_cast<int>(
        std::min<std::int64_t>(workers, chunks));
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }

  const double n = static_cast<double>(draws);
  McEstimate est;
  est.mean = std::accumulate(partial.begin(), partial.end(), 0.0) / n;
  const double second_moment =
      std::accumulate(partial_sq.begin(), partial_sq.end(), 0.0) / n;
  est.se = std::sqrt(std::max(0.0, second_moment - est.mean * est.mean) / n);
  return est;
}

// Improvement over random allocation contributed by one subject whose
// treatment-effect term is `effect` and allocation is `a`: the base response
// and the noise are common to both allocations and cancel.
inline double improvement_draw(int a, double effect) {
  return (static_cast<double>(a) - 0.5) * effect;
}

ModelSpec single_covariate_spec() {
  ModelSpec spec;
  spec.main_covariates = {"x"};
  spec.interaction_covariates = {"x"};
  return spec;
}

// Plug-in rule of the linear working model, estimated by one OLS fit on a
// large fresh sample.
AllocationRule fit_plug_in_rule(const RctDataset& fit_sample) {
  const ModelSpec spec = single_covariate_spec();
  const ResolvedSpec resolved = resolve_spec(spec, fit_sample.covariate_names);
  const FittedModel model = fit_ols(
      build_design(resolved, fit_sample.covariates, fit_sample.treatment),
      fit_sample.response);
  return AllocationRule::make_model_based(model, resolved);
}

McEstimate mc_rule_improvement_simple(const SimpleDgpParams& params,
                                      const std::function<int(Rng&, double)>& allocate,
                                      std::int64_t draws, std::uint64_t root,
                                      const McOptions& options) {
  return chunked_mc_mean(
      draws, root, options,
      [&](Rng& rng, std::int64_t count, double& sum, double& sumsq) {
        for (std::int64_t i = 0; i < count; ++i) {
          const double x = rng.normal(params.mu_x, params.sigma_x);
          const double effect = params.gamma0 + params.gamma1 * x;
          const double v = improvement_draw(allocate(rng, x), effect);
          sum += v;
          sumsq += v * v;
        }
      });
}

McEstimate mc_rule_improvement_complex(
    const ComplexDgpParams& params,
    const std::function<int(Rng&, double, double)>& allocate, std::int64_t draws,
    std::uint64_t root, const McOptions& options) {
  return chunked_mc_mean(
      draws, root, options,
      [&](Rng& rng, std::int64_t count, double& sum, double& sumsq) {
        for (std::int64_t i = 0; i < count; ++i) {
          const double x = rng.normal();
          const double u = rng.normal();
          const double effect =
              params.gamma0 + params.gamma1 * x * x * x + params.gamma2 * u;
          const double v = improvement_draw(allocate(rng, x, u), effect);
          sum += v;
          sumsq += v * v;
        }
      });
}

std::function<int(Rng&, double)> covariate_rule_fn(const AllocationRule& rule) {
  return [&rule](Rng& rng, double x) {
    Eigen::RowVectorXd row(1);
    row[0] = x;
    return decide(rule, row, rng);
  };
}

// Same decision as decide() on a single-covariate model-based rule, without
// building a row vector on every Monte Carlo draw.
std::function<int(Rng&, double)> plug_in_decider(const AllocationRule& rule) {
  const double g0 = rule.model.coefficients[2];
  const double g1 = rule.model.coefficients[3];
  const double s = direction_sign(rule.resolved.direction);
  return [g0, g1, s](Rng&, double x) { return s * (g0 + g1 * x) > 0.0 ? 1 : 0; };
}

}  // namespace

RctDataset generate_simple(const SimpleDgpParams& params, Eigen::Index n, Rng& rng) {
  check_simple(params);
  check_even_size(n);
  RctDataset data;
  data.covariates.resize(n, 1);
  data.response.resize(n);
  data.treatment = balanced_arms(n, rng);
  data.covariate_names = {"x"};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = rng.normal(params.mu_x, params.sigma_x);
    const double a = static_cast<double>(data.treatment[i]);
    data.covariates(i, 0) = x;
    data.response[i] = params.beta0 + params.beta1 * x +
                       a * (params.gamma0 + params.gamma1 * x) +
                       (params.noise_sd > 0.0 ? rng.normal(0.0, params.noise_sd) : 0.0);
  }
  return data;
}

ComplexSample generate_complex_full(const ComplexDgpParams& params, Eigen::Index n,
                                    Rng& rng) {
  check_complex(params);
  check_even_size(n);
  ComplexSample sample;
  sample.x.resize(n);
  sample.u.resize(n);
  sample.y.resize(n);
  sample.a = balanced_arms(n, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = rng.normal();
    const double u = rng.normal();
    const double a = static_cast<double>(sample.a[i]);
    sample.x[i] = x;
    sample.u[i] = u;
    sample.y[i] = params.beta0 + params.beta1 * x + params.beta2 * u +
                  a * (params.gamma0 + params.gamma1 * x * x * x + params.gamma2 * u) +
                  (params.noise_sd > 0.0 ? rng.normal(0.0, params.noise_sd) : 0.0);
  }
  return sample;
}

RctDataset generate_complex(const ComplexDgpParams& params, Eigen::Index n, Rng& rng) {
  ComplexSample sample = generate_complex_full(params, n, rng);
  RctDataset data;
  data.covariates.resize(n, 1);
  data.covariates.col(0) = sample.x;
  data.treatment = std::move(sample.a);
  data.response = std::move(sample.y);
  data.covariate_names = {"x"};
  return data;
}

double analytic_improvement_simple(const SimpleDgpParams& params) {
  check_simple(params);
  if (!(params.gamma1 > 0.0)) {
    throw input_error(
        "the closed form is stated for gamma1 > 0; use the Monte Carlo oracle");
  }
  const double z = (-params.gamma0 / params.gamma1 - params.mu_x) / params.sigma_x;
  return (params.gamma0 + params.gamma1 * params.mu_x) *
             (0.5 - standard_normal_cdf(z)) +
         params.gamma1 * params.sigma_x / kSqrt2Pi * std::exp(-0.5 * z * z);
}

namespace {

McEstimate mc_optimal_complex(const ComplexDgpParams& params, std::int64_t draws,
                              std::uint64_t root, const McOptions& options) {
  return mc_rule_improvement_complex(
      params,
      [&params](Rng&, double x, double u) {
        return params.gamma0 + params.gamma1 * x * x * x + params.gamma2 * u > 0.0
                   ? 1
                   : 0;
      },
      draws, root, options);
}

McEstimate mc_fitted_complex(const ComplexDgpParams& params, std::int64_t draws,
                             std::uint64_t root, const McOptions& options) {
  Rng fit_rng = derive_stream(root, stream_tag::generate);
  const AllocationRule fitted =
      fit_plug_in_rule(generate_complex(params, options.fit_sample_size, fit_rng));
  const auto fn = plug_in_decider(fitted);
  return mc_rule_improvement_complex(
      params, [&fn](Rng& rng_, double x, double) { return fn(rng_, x); }, draws, root,
      options);
}

}  // namespace

double mc_improvement(const SimpleDgpParams& params, OracleRule rule,
                      std::int64_t draws, Rng& rng, const McOptions& options) {
  check_simple(params);
  const std::uint64_t root = rng.next_u64();
  if (rule == OracleRule::optimal_under_dgp) {
    return mc_rule_improvement_simple(
               params,
               [&params](Rng&, double x) {
                 return params.gamma0 + params.gamma1 * x > 0.0 ? 1 : 0;
               },
               draws, root, options)
        .mean;
  }
  Rng fit_rng = derive_stream(root, stream_tag::generate);
  const AllocationRule fitted =
      fit_plug_in_rule(generate_simple(params, options.fit_sample_size, fit_rng));
  return mc_rule_improvement_simple(params, plug_in_decider(fitted), draws, root,
                                    options)
      .mean;
}

double mc_improvement(const ComplexDgpParams& params, OracleRule rule,
                      std::int64_t draws, Rng& rng, const McOptions& options) {
  check_complex(params);
  const std::uint64_t root = rng.next_u64();
  if (rule == OracleRule::optimal_under_dgp) {
    return mc_optimal_complex(params, draws, root, options).mean;
  }
  return mc_fitted_complex(params, draws, root, options).mean;
}

double mc_improvement(const SimpleDgpParams& params, const AllocationRule& rule,
                      std::int64_t draws, Rng& rng, const McOptions& options) {
  check_simple(params);
  const std::uint64_t root = rng.next_u64();
  return mc_rule_improvement_simple(params, covariate_rule_fn(rule), draws, root,
                                    options)
      .mean;
}

double mc_improvement(const ComplexDgpParams& params, const AllocationRule& rule,
                      std::int64_t draws, Rng& rng, const McOptions& options) {
  check_complex(params);
  const std::uint64_t root = rng.next_u64();
  const auto fn = covariate_rule_fn(rule);
  return mc_rule_improvement_complex(
             params, [&fn](Rng& rng_, double x, double) { return fn(rng_, x); }, draws,
             root, options)
      .mean;
}

ShortfallDecomposition decompose_shortfall(const ComplexDgpParams& params,
                                           std::int64_t draws, Rng& rng,
                                           const McOptions& options) {
  check_complex(params);
  ShortfallDecomposition out;
  const McEstimate optimal =
      mc_optimal_complex(params, draws, rng.next_u64(), options);
  out.mu_optimal = optimal.mean;

  out.mu_linear_with_u =
      mc_rule_improvement_complex(
          params,
          [&params](Rng&, double x, double u) {
            return params.gamma0 + params.gamma1 * x + params.gamma2 * u > 0.0 ? 1 : 0;
          },
          draws, rng.next_u64(), options)
          .mean;

  out.mu_cubic_no_u =
      mc_rule_improvement_complex(
          params,
          [&params](Rng&, double x, double) {
            return params.gamma0 + params.gamma1 * x * x * x > 0.0 ? 1 : 0;
          },
          draws, rng.next_u64(), options)
          .mean;

  const McEstimate fitted = mc_fitted_complex(params, draws, rng.next_u64(), options);
  out.mu_fitted = fitted.mean;

  // When the gap is indistinguishable from Monte Carlo noise there is nothing
  // to attribute; share ratios would just divide noise by noise.
  const double gap = out.mu_optimal - out.mu_fitted;
  const double gap_se = std::hypot(optimal.se, fitted.se);
  if (std::abs(gap) < std::max(1e-3, 6.0 * gap_se)) {
    return out;
  }
  out.share_nonlinearity = (out.mu_optimal - out.mu_linear_with_u) / gap;
  out.share_unobserved = (out.mu_linear_with_u - out.mu_cubic_no_u) / gap;
  return out;
}

}  // namespace treatval
