#include "treatval/allocation.hpp"

#include "treatval/errors.hpp"

namespace treatval {

int decide(const AllocationRule& rule, const Eigen::RowVectorXd& x, Rng& rng) {
  switch (rule.kind) {
    case AllocationRule::Kind::model_based: {
      const double contrast = treatment_contrast(rule.model, rule.resolved, x);
      return direction_sign(rule.resolved.direction) * contrast > 0.0 ? 1 : 0;
    }
    case AllocationRule::Kind::random:
      return rng.bernoulli_half();
    case AllocationRule::Kind::best:
      return rule.arm;
  }
  return 0;  // unreachable
}

int fit_best_arm(const Eigen::VectorXd& y, const Eigen::VectorXi& a, Direction direction) {
  if (y.size() != a.size()) {
    throw input_error("response and treatment lengths disagree");
  }
  double sum0 = 0.0, sum1 = 0.0;
  Eigen::Index n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (a[i] == 1) {
      sum1 += y[i];
      ++n1;
    } else {
      sum0 += y[i];
      ++n0;
    }
  }
  if (n0 == 0 || n1 == 0) {
    throw estimation_error("cannot pick the best arm: only one arm present");
  }
  const double mean0 = sum0 / static_cast<double>(n0);
  const double mean1 = sum1 / static_cast<double>(n1);
  const double s = direction_sign(direction);
  return s * mean1 > s * mean0 ? 1 : 0;
}

}  // namespace treatval
