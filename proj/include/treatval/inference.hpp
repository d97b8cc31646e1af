#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "treatval/improvement.hpp"

namespace treatval {

// Only the percentile method is implemented; the enum leaves room for other
// bootstrap interval constructions.
enum class IntervalMethod { percentile };

struct BootstrapOptions {
  int K = 10;
  int B = 3000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int workers = 1;
  IntervalMethod method = IntervalMethod::percentile;
  bool best_from_training_folds = false;
  std::ostream* warn = nullptr;  // fold-reduction notes from the observed pass
};

struct BootstrapResult {
  std::vector<double> samples_random;  // replicate b at index b
  std::vector<double> samples_best;
  ImprovementEstimate observed;  // full-data CV estimate
  int B = 0;
  double alpha = 0.0;
  std::pair<double, double> ci_random;
  std::pair<double, double> ci_best;
  double p_random = 0.0;
  double p_best = 0.0;
  long redraw_count = 0;  // degenerate replicates that were redrawn
};

// Empirical quantiles at alpha/2 and 1-alpha/2 by nearest rank on the sorted
// samples (index ceil(q*B), clamped to [1, B]); the endpoints are actual
// bootstrap samples. Throws input_error on empty samples or alpha outside
// (0, 1).
std::pair<double, double> percentile_ci(const std::vector<double>& samples,
                                        double alpha);

// Higher is better tests H0: mu <= 0 and counts samples <= 0; lower is
// better tests H0: mu >= 0 and counts samples >= 0. Ties at exactly 0 count
// against rejection either way.
double one_sided_pvalue(const std::vector<double>& samples, Direction direction);

// Nonparametric bootstrap of the CV improvement estimates: replicate b
// resamples the data with replacement and reruns the K-fold CV, with every
// random stream derived from (seed, b, attempt) so results are bit-identical
// for a fixed seed regardless of worker count. Replicates whose resample
// cannot be estimated (degenerate cells) are redrawn up to 50 times, then the
// whole call aborts with diagnostics.
BootstrapResult bootstrap_inference(const RctDataset& data, const ModelSpec& spec,
                                    const BootstrapOptions& options);

}  // namespace treatval
