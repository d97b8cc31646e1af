#include "treatval/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "treatval/errors.hpp"

namespace treatval {

std::pair<double, double> percentile_ci(const std::vector<double>& samples,
                                        double alpha) {
  if (samples.empty()) {
    throw input_error("cannot take percentiles of an empty sample vector");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw input_error("alpha must lie strictly between 0 and 1");
  }
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const auto b = static_cast<double>(sorted.size());
  auto nearest_rank = [&](double q) {
    auto idx = static_cast<std::size_t>(
        std::clamp(std::ceil(q * b), 1.0, b));
    return sorted[idx - 1];
  };
  return {nearest_rank(alpha / 2.0), nearest_rank(1.0 - alpha / 2.0)};
}

double one_sided_pvalue(const std::vector<double>& samples, Direction direction) {
  if (samples.empty()) {
    throw input_error("cannot compute a p-value from an empty sample vector");
  }
  std::size_t count = 0;
  for (double v : samples) {
    if (direction == Direction::higher_is_better ? v <= 0.0 : v >= 0.0) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

namespace {

constexpr int kMaxReplicateRedraws = 50;

// One bootstrap replicate; every stream depends only on (seed, b, attempt).
ImprovementEstimate run_replicate(const RctDataset& data, const ModelSpec& spec,
                                  const BootstrapOptions& options, int b,
                                  int& redraws) {
  CvOptions cv;
  cv.best_from_training_folds = options.best_from_training_folds;
  std::string last_error;
  for (int attempt = 0; attempt <= kMaxReplicateRedraws; ++attempt) {
    try {
      Rng resample_rng = derive_stream(options.seed, stream_tag::resample,
                                       static_cast<std::uint64_t>(b),
                                       static_cast<std::uint64_t>(attempt));
      const RctDataset resample = resample_with_replacement(data, resample_rng);
      Rng cv_rng = derive_stream(options.seed, stream_tag::folds,
                                 static_cast<std::uint64_t>(b),
                                 static_cast<std::uint64_t>(attempt));
      return cv_improvement(resample, spec, options.K, cv_rng, cv);
    } catch (const estimation_error& e) {
      last_error = e.what();
      ++redraws;
    }
  }
  throw estimation_error("bootstrap replicate " + std::to_string(b) +
                         " still degenerate after " +
                         std::to_string(kMaxReplicateRedraws) +
                         " redraws; last failure: " + last_error);
}

}  // namespace

BootstrapResult bootstrap_inference(const RctDataset& data, const ModelSpec& spec,
                                    const BootstrapOptions& options) {
  if (options.B < 1) {
    throw input_error("B must be at least 1");
  }
  if (!(options.alpha > 0.0) || !(options.alpha < 1.0)) {
    throw input_error("alpha must lie strictly between 0 and 1");
  }
  if (options.workers < 1) {
    throw input_error("workers must be at least 1");
  }
  validate_dataset(data);
  const Direction direction = spec.response_direction;

  BootstrapResult result;
  result.B = options.B;
  result.alpha = options.alpha;

  {
    Rng observed_rng = derive_stream(options.seed, stream_tag::observed);
    CvOptions cv;
    cv.best_from_training_folds = options.best_from_training_folds;
    cv.warn = options.warn;
    result.observed = cv_improvement(data, spec, options.K, observed_rng, cv);
  }

  const auto b_total = static_cast<std::size_t>(options.B);
  result.samples_random.resize(b_total);
  result.samples_best.resize(b_total);
  std::vector<int> redraws(b_total, 0);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker_loop = [&] {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= options.B || failed.load()) return;
      try {
        const ImprovementEstimate est =
            run_replicate(data, spec, options, b, redraws[static_cast<std::size_t>(b)]);
        result.samples_random[static_cast<std::size_t>(b)] = est.i_random;
        result.samples_best[static_cast<std::size_t>(b)] = est.i_best;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int thread_count = std::min(options.workers, options.B);
  if (thread_count <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker_loop);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (int r : redraws) result.redraw_count += r;
  result.ci_random = percentile_ci(result.samples_random, options.alpha);
  result.ci_best = percentile_ci(result.samples_best, options.alpha);
  result.p_random = one_sided_pvalue(result.samples_random, direction);
  result.p_best = one_sided_pvalue(result.samples_best, direction);
  return result;
}

}  // namespace treatval
