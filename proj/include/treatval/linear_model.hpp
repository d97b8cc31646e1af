#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace treatval {

enum class Direction { higher_is_better, lower_is_better };

// +1 when larger responses are better, -1 when smaller are.
inline double direction_sign(Direction d) {
  return d == Direction::higher_is_better ? 1.0 : -1.0;
}

// The pre-specified linear response model: main-effect covariates plus the
// subset that interacts with the treatment indicator. Names resolve against a
// dataset's covariate_names.
struct ModelSpec {
  std::vector<std::string> main_covariates;
  std::vector<std::string> interaction_covariates;
  Direction response_direction = Direction::higher_is_better;
};

ModelSpec model_spec_from_json(const nlohmann::json& j);
nlohmann::json model_spec_to_json(const ModelSpec& spec);

// ModelSpec with names resolved to covariate-column indices.
struct ResolvedSpec {
  std::vector<Eigen::Index> main_idx;
  std::vector<Eigen::Index> inter_idx;
  Direction direction = Direction::higher_is_better;

  // 1 (intercept) + mains + 1 (treatment) + interactions
  Eigen::Index design_cols() const {
    return 2 + static_cast<Eigen::Index>(main_idx.size() + inter_idx.size());
  }
};

// Throws input_error for names missing from covariate_names or interaction
// names outside the main list.
ResolvedSpec resolve_spec(const ModelSpec& spec,
                          const std::vector<std::string>& covariate_names);

// Design columns in the fixed order [1, x_1..x_p, A, A*x_1'..A*x_p'].
Eigen::MatrixXd build_design(const ResolvedSpec& spec,
                             const Eigen::MatrixXd& covariates,
                             const Eigen::VectorXi& treatment);

// One design row for covariate row x under treatment a.
Eigen::RowVectorXd expand_row(const ResolvedSpec& spec,
                              const Eigen::RowVectorXd& x, int a);

// OLS coefficients over the design expansion, ordered like the design
// columns. Columns dropped for rank deficiency carry coefficient 0 and are
// flagged aliased, so predictions stay finite on collinear designs.
struct FittedModel {
  Eigen::VectorXd coefficients;
  std::vector<bool> aliased;
  Eigen::Index rank = 0;
};

// Least squares by column-pivoted (rank-revealing) Householder QR. A pivot
// whose magnitude falls below 1e-10 times the largest marks its column
// aliased. Throws input_error on non-finite or empty input.
FittedModel fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

double predict(const FittedModel& model, const ResolvedSpec& spec,
               const Eigen::RowVectorXd& x, int a);

// f(x,1) - f(x,0) = gamma_0 + sum_j gamma_j x_j'.
double treatment_contrast(const FittedModel& model, const ResolvedSpec& spec,
                          const Eigen::RowVectorXd& x);

}  // namespace treatval
