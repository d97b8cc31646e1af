#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <string>
#include <vector>

#include "treatval/rng.hpp"

namespace treatval {

// Two-arm RCT data: the column-bound [X, A, y]. Immutable after
// construction/validation and safely shareable across threads.
struct RctDataset {
  Eigen::MatrixXd covariates;               // n x p
  Eigen::VectorXi treatment;                // entries in {0,1}
  Eigen::VectorXd response;                 // length n
  std::vector<std::string> covariate_names; // length p

  Eigen::Index n() const { return response.size(); }
  Eigen::Index p() const { return covariates.cols(); }
  Eigen::Index arm_count(int arm) const;
};

// Checks all RctDataset invariants: finite values, treatments in {0,1},
// both arms with >= 2 subjects, n >= 4. Throws input_error.
void validate_dataset(const RctDataset& data);

// Reads a strict numeric CSV (header row, UTF-8, decimal-point reals, no
// quoting). The named treatment/response columns are pulled out; every other
// column becomes a covariate in file order.
RctDataset load_csv(const std::string& path, const std::string& treatment_column,
                    const std::string& response_column);

// K-fold partition. fold_of[i] in [0, K). Sizes differ by at most one and
// every fold's complement contains both arms.
struct FoldAssignment {
  std::vector<int> fold_of;
  int K = 0;
  int requested_K = 0;  // differs from K when the fold count was reduced

  std::vector<std::vector<Eigen::Index>> fold_indices() const;
};

// Uniformly random partition, deterministic given the stream. If the
// requested K is infeasible (some training set keeps missing an arm after
// 100 redraws), K is lowered to the smaller arm size and retried; `warn`
// (when non-null) receives a note about the reduction.
FoldAssignment make_folds(const RctDataset& data, int K, Rng& rng,
                          std::ostream* warn = nullptr);

// n rows drawn i.i.d. uniformly with replacement, rows copied intact.
// Redraws the whole resample until both arms have >= 2 subjects so the
// result is again a valid RctDataset.
RctDataset resample_with_replacement(const RctDataset& data, Rng& rng);

}  // namespace treatval
