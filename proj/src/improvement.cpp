#include "treatval/improvement.hpp"

#include <nlohmann/json.hpp>
#include <numeric>

#include "treatval/allocation.hpp"
#include "treatval/errors.hpp"

namespace treatval {

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double mean_of_union(const std::vector<double>& a, const std::vector<double>& b) {
  const double total = std::accumulate(a.begin(), a.end(), 0.0) +
                       std::accumulate(b.begin(), b.end(), 0.0);
  return total / static_cast<double>(a.size() + b.size());
}

}  // namespace

CrossTab crosstab(const std::vector<double>& y_test, const std::vector<int>& a_test,
                  const std::vector<int>& d_hat) {
  if (y_test.size() != a_test.size() || y_test.size() != d_hat.size()) {
    throw input_error("crosstab inputs must have equal lengths");
  }
  CrossTab tab;
  for (std::size_t i = 0; i < y_test.size(); ++i) {
    if (a_test[i] == 0) {
      (d_hat[i] == 0 ? tab.p : tab.q).push_back(y_test[i]);
    } else {
      (d_hat[i] == 0 ? tab.r : tab.s).push_back(y_test[i]);
    }
  }
  return tab;
}

ImprovementEstimate improvement_from_crosstab(const CrossTab& tab, Direction direction) {
  if (tab.n_test() == 0) {
    throw estimation_error("empty test collection: nothing to estimate from");
  }
  if (tab.p.empty() && tab.s.empty()) {
    throw estimation_error("rule never agreed with randomization (P u S is empty)");
  }
  if (tab.p.empty() && tab.q.empty()) {
    throw estimation_error("no control-arm subjects in the test collection");
  }
  if (tab.r.empty() && tab.s.empty()) {
    throw estimation_error("no treatment-arm subjects in the test collection");
  }

  ImprovementEstimate est;
  est.value_d = mean_of_union(tab.p, tab.s);
  const double total = std::accumulate(tab.p.begin(), tab.p.end(), 0.0) +
                       std::accumulate(tab.q.begin(), tab.q.end(), 0.0) +
                       std::accumulate(tab.r.begin(), tab.r.end(), 0.0) +
                       std::accumulate(tab.s.begin(), tab.s.end(), 0.0);
  est.value_random = total / static_cast<double>(tab.n_test());

  const double arm0 = mean_of_union(tab.p, tab.q);  // everyone with A=0
  const double arm1 = mean_of_union(tab.r, tab.s);  // everyone with A=1
  const double sign = direction_sign(direction);
  est.value_best = sign * arm0 >= sign * arm1 ? arm0 : arm1;

  est.i_random = est.value_d - est.value_random;
  est.i_best = est.value_d - est.value_best;
  est.tab = tab;
  return est;
}

ImprovementEstimate cv_improvement(const RctDataset& data, const ModelSpec& spec,
                                   int K, Rng& rng, const CvOptions& options) {
  validate_dataset(data);
  const ResolvedSpec resolved = resolve_spec(spec, data.covariate_names);
  if (data.n() <= resolved.design_cols()) {
    throw input_error("dataset has " + std::to_string(data.n()) +
                      " rows but the model expands to " +
                      std::to_string(resolved.design_cols()) +
                      " design columns; more rows than columns are required");
  }

  const FoldAssignment folds = make_folds(data, K, rng, options.warn);
  const Eigen::Index n = data.n();

  std::vector<double> y_pool(static_cast<std::size_t>(n));
  std::vector<int> a_pool(static_cast<std::size_t>(n));
  std::vector<int> d_pool(static_cast<std::size_t>(n));
  std::vector<int> best_pool(static_cast<std::size_t>(n));

  for (const auto& test_idx : folds.fold_indices()) {
    // Assemble the complement (training) slice.
    std::vector<char> in_test(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i : test_idx) in_test[static_cast<std::size_t>(i)] = 1;
    const Eigen::Index n_train = n - static_cast<Eigen::Index>(test_idx.size());
    Eigen::MatrixXd x_train(n_train, data.p());
    Eigen::VectorXi a_train(n_train);
    Eigen::VectorXd y_train(n_train);
    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_test[static_cast<std::size_t>(i)]) continue;
      x_train.row(row) = data.covariates.row(i);
      a_train[row] = data.treatment[i];
      y_train[row] = data.response[i];
      ++row;
    }

    const FittedModel model =
        fit_ols(build_design(resolved, x_train, a_train), y_train);
    const AllocationRule rule = AllocationRule::make_model_based(model, resolved);
    const int fold_best_arm = options.best_from_training_folds
                                  ? fit_best_arm(y_train, a_train, resolved.direction)
                                  : 0;

    for (Eigen::Index i : test_idx) {
      const auto slot = static_cast<std::size_t>(i);
      y_pool[slot] = data.response[i];
      a_pool[slot] = data.treatment[i];
      d_pool[slot] = decide(rule, data.covariates.row(i), rng);
      best_pool[slot] = fold_best_arm;
    }
  }

  ImprovementEstimate est =
      improvement_from_crosstab(crosstab(y_pool, a_pool, d_pool), resolved.direction);

  if (options.best_from_training_folds) {
    // Value the fold-estimated best rule by arm agreement, like the lucky-set
    // mean for d.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < y_pool.size(); ++i) {
      if (a_pool[i] == best_pool[i]) {
        sum += y_pool[i];
        ++count;
      }
    }
    if (count == 0) {
      throw estimation_error(
          "fold-estimated best arms never agreed with randomization");
    }
    est.value_best = sum / static_cast<double>(count);
    est.i_best = est.value_d - est.value_best;
  }
  return est;
}

nlohmann::json improvement_to_json(const ImprovementEstimate& estimate) {
  return nlohmann::json{
      {"i_random", estimate.i_random},
      {"i_best", estimate.i_best},
      {"value_d", estimate.value_d},
      {"value_random", estimate.value_random},
      {"value_best", estimate.value_best},
      {"cell_counts",
       {{"n_00", estimate.tab.n_00()},
        {"n_01", estimate.tab.n_01()},
        {"n_10", estimate.tab.n_10()},
        {"n_11", estimate.tab.n_11()}}}};
}

}  // namespace treatval
