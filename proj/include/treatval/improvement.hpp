#pragma once

#include <nlohmann/json_fwd.hpp>
#include <ostream>
#include <vector>

#include "treatval/dataset.hpp"
#include "treatval/linear_model.hpp"

namespace treatval {

// Out-of-sample responses cross-tabulated by administered treatment A and
// the rule's recommendation d:
//   P: (A=0, d=0)   Q: (A=0, d=1)
//   R: (A=1, d=0)   S: (A=1, d=1)
// P and S hold the "lucky" subjects whose randomized arm matched the rule.
struct CrossTab {
  std::vector<double> p, q, r, s;

  std::size_t n_00() const { return p.size(); }
  std::size_t n_01() const { return q.size(); }
  std::size_t n_10() const { return r.size(); }
  std::size_t n_11() const { return s.size(); }
  std::size_t n_test() const { return n_00() + n_01() + n_10() + n_11(); }
};

CrossTab crosstab(const std::vector<double>& y_test, const std::vector<int>& a_test,
                  const std::vector<int>& d_hat);

// Point estimates of the improvement over the two baselines:
//   i_random = mean(P u S) - mean(all)
//   i_best   = mean(P u S) - better arm mean (max of the two arm means when
//              higher is better, min when lower is better)
struct ImprovementEstimate {
  double i_random = 0.0;
  double i_best = 0.0;
  double value_d = 0.0;       // mean over P u S
  double value_random = 0.0;  // mean over the whole test collection
  double value_best = 0.0;
  CrossTab tab;
};

// Throws estimation_error when P u S is empty ("rule never agreed with
// randomization") or either arm's cell pair is empty.
ImprovementEstimate improvement_from_crosstab(const CrossTab& tab, Direction direction);

struct CvOptions {
  // When set, the best baseline is re-estimated on each training fold and
  // valued by arm agreement, instead of the default test-set arm means.
  bool best_from_training_folds = false;
  std::ostream* warn = nullptr;  // receives fold-reduction notes
};

// K-fold cross-validated improvement: fit on each fold's complement, decide
// on the fold, pool all n out-of-sample (y, A, d) triples into one cross-tab
// and estimate from the pooled table. Pure function of (data, spec, K, rng
// stream).
ImprovementEstimate cv_improvement(const RctDataset& data, const ModelSpec& spec,
                                   int K, Rng& rng, const CvOptions& options = {});

nlohmann::json improvement_to_json(const ImprovementEstimate& estimate);

}  // namespace treatval
