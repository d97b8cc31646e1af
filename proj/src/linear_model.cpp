#include "treatval/linear_model.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "treatval/errors.hpp"

namespace treatval {

namespace {
constexpr double kRankTolerance = 1e-10;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  if (!j.is_object() || !j.contains("main") || !j.contains("interactions")) {
    throw input_error("model spec JSON must contain 'main' and 'interactions' arrays");
  }
  spec.main_covariates = j.at("main").get<std::vector<std::string>>();
  spec.interaction_covariates = j.at("interactions").get<std::vector<std::string>>();
  if (j.contains("direction")) {
    const std::string d = j.at("direction").get<std::string>();
    if (d == "higher") {
      spec.response_direction = Direction::higher_is_better;
    } else if (d == "lower") {
      spec.response_direction = Direction::lower_is_better;
    } else {
      throw input_error("model spec direction must be 'higher' or 'lower', got '" + d + "'");
    }
  }
  return spec;
}

nlohmann::json model_spec_to_json(const ModelSpec& spec) {
  return nlohmann::json{
      {"main", spec.main_covariates},
      {"interactions", spec.interaction_covariates},
      {"direction",
       spec.response_direction == Direction::higher_is_better ? "higher" : "lower"}};
}

ResolvedSpec resolve_spec(const ModelSpec& spec,
                          const std::vector<std::string>& covariate_names) {
  auto index_of = [&](const std::string& name) -> Eigen::Index {
    auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
    if (it == covariate_names.end()) {
      throw input_error("covariate '" + name + "' not present in the dataset");
    }
    return static_cast<Eigen::Index>(it - covariate_names.begin());
  };

  ResolvedSpec resolved;
  resolved.direction = spec.response_direction;
  if (spec.main_covariates.empty()) {
    throw input_error("model spec needs at least one main covariate");
  }
  for (const auto& name : spec.main_covariates) {
    resolved.main_idx.push_back(index_of(name));
  }
  for (const auto& name : spec.interaction_covariates) {
    if (std::find(spec.main_covariates.begin(), spec.main_covariates.end(), name) ==
        spec.main_covariates.end()) {
      throw input_error("interaction covariate '" + name +
                        "' is not in the main covariate list");
    }
    resolved.inter_idx.push_back(index_of(name));
  }
  return resolved;
}

Eigen::MatrixXd build_design(const ResolvedSpec& spec,
                             const Eigen::MatrixXd& covariates,
                             const Eigen::VectorXi& treatment) {
  const Eigen::Index n = covariates.rows();
  if (treatment.size() != n) {
    throw input_error("treatment length does not match covariate rows");
  }
  const auto p = static_cast<Eigen::Index>(spec.main_idx.size());
  const auto q = static_cast<Eigen::Index>(spec.inter_idx.size());
  Eigen::MatrixXd design(n, spec.design_cols());
  design.col(0).setOnes();
  for (Eigen::Index j = 0; j < p; ++j) {
    design.col(1 + j) = covariates.col(spec.main_idx[static_cast<std::size_t>(j)]);
  }
  const Eigen::VectorXd a = treatment.cast<double>();
  design.col(1 + p) = a;
  for (Eigen::Index j = 0; j < q; ++j) {
    design.col(2 + p + j) =
        a.cwiseProduct(covariates.col(spec.inter_idx[static_cast<std::size_t>(j)]));
  }
  return design;
}

Eigen::RowVectorXd expand_row(const ResolvedSpec& spec,
                              const Eigen::RowVectorXd& x, int a) {
  const auto p = static_cast<Eigen::Index>(spec.main_idx.size());
  const auto q = static_cast<Eigen::Index>(spec.inter_idx.size());
  Eigen::RowVectorXd row(spec.design_cols());
  row[0] = 1.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    row[1 + j] = x[spec.main_idx[static_cast<std::size_t>(j)]];
  }
  row[1 + p] = static_cast<double>(a);
  for (Eigen::Index j = 0; j < q; ++j) {
    row[2 + p + j] = a == 0 ? 0.0 : x[spec.inter_idx[static_cast<std::size_t>(j)]];
  }
  return row;
}

FittedModel fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  if (n == 0 || m == 0) {
    throw input_error("empty design matrix");
  }
  if (response.size() != n) {
    throw input_error("response length does not match design rows");
  }
  if (!design.allFinite() || !response.allFinite()) {
    throw input_error("non-finite values in the regression inputs");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(kRankTolerance);
  const Eigen::Index rank = qr.rank();

  FittedModel model;
  model.rank = rank;
  model.coefficients = Eigen::VectorXd::Zero(m);
  model.aliased.assign(static_cast<std::size_t>(m), true);
  if (rank == 0) {
    return model;
  }

  // The pivot order puts the retained (independent) columns first; refit on
  // just those so aliased columns contribute exactly zero.
  const auto& perm = qr.colsPermutation().indices();
  std::vector<Eigen::Index> kept(static_cast<std::size_t>(rank));
  for (Eigen::Index k = 0; k < rank; ++k) {
    kept[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(perm[k]);
  }
  if (rank == m) {
    model.coefficients = qr.solve(response);
    model.aliased.assign(static_cast<std::size_t>(m), false);
    return model;
  }

  Eigen::MatrixXd reduced(n, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    reduced.col(k) = design.col(kept[static_cast<std::size_t>(k)]);
  }
  const Eigen::VectorXd beta = reduced.householderQr().solve(response);
  for (Eigen::Index k = 0; k < rank; ++k) {
    model.coefficients[kept[static_cast<std::size_t>(k)]] = beta[k];
    model.aliased[static_cast<std::size_t>(kept[static_cast<std::size_t>(k)])] = false;
  }
  return model;
}

double predict(const FittedModel& model, const ResolvedSpec& spec,
               const Eigen::RowVectorXd& x, int a) {
  return expand_row(spec, x, a).dot(model.coefficients);
}

double treatment_contrast(const FittedModel& model, const ResolvedSpec& spec,
                          const Eigen::RowVectorXd& x) {
  const auto p = static_cast<Eigen::Index>(spec.main_idx.size());
  double contrast = model.coefficients[1 + p];
  for (std::size_t j = 0; j < spec.inter_idx.size(); ++j) {
    contrast += model.coefficients[2 + p + static_cast<Eigen::Index>(j)] *
                x[spec.inter_idx[j]];
  }
  return contrast;
}

}  // namespace treatval
