#pragma once

#include <cstdint>

#include "treatval/allocation.hpp"
#include "treatval/dataset.hpp"

namespace treatval {

// Y = beta0 + beta1*X + A*(gamma0 + gamma1*X) + noise,  X ~ N(mu_x, sigma_x^2).
struct SimpleDgpParams {
  double beta0 = 1.0;
  double beta1 = -1.0;
  double gamma0 = 0.0;
  double gamma1 = 2.5066282746310002;  // sqrt(2*pi), tuned so mu = 1
  double mu_x = 0.0;
  double sigma_x = 1.0;
  double noise_sd = 1.0;

  static SimpleDgpParams paper() { return SimpleDgpParams{}; }
};

// Y = beta0 + beta1*X + beta2*U + A*(gamma0 + gamma1*X^3 + gamma2*U) + noise,
// X, U independent standard normal; U never leaves the generator.
struct ComplexDgpParams {
  double beta0 = 1.0;
  double beta1 = -1.0;
  double beta2 = 0.5;
  double gamma0 = 0.0;
  double gamma1 = 1.0;
  double gamma2 = -3.0;
  double noise_sd = 1.0;

  static ComplexDgpParams paper() { return ComplexDgpParams{}; }
};

// Balanced two-arm trial of even size n >= 4: A is a random permutation of
// n/2 zeros and n/2 ones. Throws input_error on odd or too-small n.
RctDataset generate_simple(const SimpleDgpParams& params, Eigen::Index n, Rng& rng);

// As above for the three-term response; the returned dataset exposes only X.
RctDataset generate_complex(const ComplexDgpParams& params, Eigen::Index n, Rng& rng);

// Complex draw with the hidden covariate visible; the building block behind
// generate_complex, exported for oracle fits over U.
struct ComplexSample {
  Eigen::VectorXd x, u;
  Eigen::VectorXi a;
  Eigen::VectorXd y;
};
ComplexSample generate_complex_full(const ComplexDgpParams& params, Eigen::Index n,
                                    Rng& rng);

// Closed-form population improvement of the optimal rule over random
// allocation for the simple response, X ~ N(mu_x, sigma_x^2):
//   (g0 + g1*mu)*(1/2 - Phi(z)) + g1*sigma/sqrt(2*pi) * exp(-z^2/2),
//   z = (-g0/g1 - mu)/sigma.
// Defined for gamma1 > 0 only; otherwise throws input_error pointing at the
// Monte Carlo oracle.
double analytic_improvement_simple(const SimpleDgpParams& params);

enum class OracleRule {
  optimal_under_dgp,     // sign of the true treatment-effect term
  fitted_approximation,  // plug-in rule from one large-sample OLS fit
};

struct McOptions {
  // Draws are processed in fixed-size chunks, each with a stream derived
  // from (root, chunk index); results depend on chunk_size but never on
  // workers.
  std::int64_t chunk_size = 1 << 16;
  int workers = 1;
  Eigen::Index fit_sample_size = 1'000'000;  // for fitted_approximation
};

// Monte Carlo mean of Y under the rule minus Y under random allocation over
// fresh draws. The additive noise term is shared by both allocations of a
// draw and cancels from the difference exactly.
double mc_improvement(const SimpleDgpParams& params, OracleRule rule,
                      std::int64_t draws, Rng& rng, const McOptions& options = {});
double mc_improvement(const ComplexDgpParams& params, OracleRule rule,
                      std::int64_t draws, Rng& rng, const McOptions& options = {});

// Same, for an explicit allocation rule that sees only the covariate row [x].
double mc_improvement(const SimpleDgpParams& params, const AllocationRule& rule,
                      std::int64_t draws, Rng& rng, const McOptions& options = {});
double mc_improvement(const ComplexDgpParams& params, const AllocationRule& rule,
                      std::int64_t draws, Rng& rng, const McOptions& options = {});

// Splits the shortfall between the optimal rule's improvement and the fitted
// misspecified rule's improvement into the part lost to the hidden covariate
// and the part lost to linearizing X^3, via the intermediate rule
// 1{g0 + g1*X + g2*U > 0}. Shares are of gap = mu_optimal - mu_fitted; a
// |gap| < 1e-3 guard returns zero shares (nothing to attribute).
struct ShortfallDecomposition {
  double mu_optimal = 0.0;        // X^3 and U
  double mu_linear_with_u = 0.0;  // linear X, U kept
  double mu_cubic_no_u = 0.0;     // X^3 kept, U dropped
  double mu_fitted = 0.0;         // large-sample fit of the linear-X model
  double share_unobserved = 0.0;
  double share_nonlinearity = 0.0;
};
ShortfallDecomposition decompose_shortfall(const ComplexDgpParams& params,
                                           std::int64_t draws, Rng& rng,
                                           const McOptions& options = {});

}  // namespace treatval
