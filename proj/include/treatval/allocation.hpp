#pragma once

#include <Eigen/Dense>

#include "treatval/linear_model.hpp"
#include "treatval/rng.hpp"

namespace treatval {

// A treatment allocation procedure: the model-based rule d[f] or one of the
// business-as-usual baselines. Immutable; decide() is reentrant (the random
// rule draws from a caller-owned stream).
struct AllocationRule {
  enum class Kind { model_based, random, best };

  Kind kind = Kind::random;
  FittedModel model;     // model_based only
  ResolvedSpec resolved; // model_based only
  int arm = 0;           // best only

  static AllocationRule make_model_based(FittedModel model, ResolvedSpec resolved) {
    AllocationRule rule;
    rule.kind = Kind::model_based;
    rule.model = std::move(model);
    rule.resolved = std::move(resolved);
    return rule;
  }
  static AllocationRule make_random() { return AllocationRule{}; }
  static AllocationRule make_best(int arm) {
    AllocationRule rule;
    rule.kind = Kind::best;
    rule.arm = arm;
    return rule;
  }
};

// Model-based: 1 iff the direction-adjusted predicted contrast
// s * (f(x,1) - f(x,0)) is strictly positive; an exact tie goes to arm 0.
// Random: fair coin. Best: the stored arm.
int decide(const AllocationRule& rule, const Eigen::RowVectorXd& x, Rng& rng);

// The arm whose sample mean response is better under the direction; an exact
// tie goes to arm 0. Throws estimation_error on single-arm input.
int fit_best_arm(const Eigen::VectorXd& y, const Eigen::VectorXi& a, Direction direction);

}  // namespace treatval
