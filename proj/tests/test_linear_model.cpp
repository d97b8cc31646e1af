#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "treatval/errors.hpp"
#include "treatval/linear_model.hpp"

using namespace treatval;

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

ModelSpec xx_spec(Direction d = Direction::higher_is_better) {
  ModelSpec spec;
  spec.main_covariates = {"x"};
  spec.interaction_covariates = {"x"};
  spec.response_direction = d;
  return spec;
}

}  // namespace

TEST_CASE("build_design expands rows in the fixed column order") {
  Eigen::MatrixXd x(2, 1);
  x << 2.0, 2.0;
  Eigen::VectorXi a(2);
  a << 1, 0;
  const ResolvedSpec resolved = resolve_spec(xx_spec(), {"x"});
  const Eigen::MatrixXd design = build_design(resolved, x, a);
  REQUIRE(design.rows() == 2);
  REQUIRE(design.cols() == 4);
  CHECK(design.row(0) == Eigen::RowVector4d(1, 2, 1, 2));
  CHECK(design.row(1) == Eigen::RowVector4d(1, 2, 0, 0));
}

TEST_CASE("the depression model expands to 16 columns") {
  ModelSpec spec;
  spec.main_covariates = {"intake_HRSD", "iq_ship", "age",  "chronic",
                          "married",     "unemployed", "life_stressors",
                          "pdstatus",    "drugs012"};
  spec.interaction_covariates = {"married", "unemployed", "life_stressors",
                                 "pdstatus", "drugs012"};
  const auto trial = testutil::synthetic_depression_trial(3);
  const ResolvedSpec resolved = resolve_spec(spec, trial.covariate_names);
  CHECK(resolved.design_cols() == 16);
  CHECK(build_design(resolved, trial.covariates, trial.treatment).cols() == 16);
}

TEST_CASE("resolve_spec rejects unknown or non-main names") {
  ModelSpec spec = xx_spec();
  spec.main_covariates = {"z"};
  CHECK_THROWS_WITH_AS(resolve_spec(spec, {"x"}), doctest::Contains("z"), input_error);

  ModelSpec bad_inter = xx_spec();
  bad_inter.interaction_covariates = {"w"};
  bad_inter.main_covariates = {"x"};
  CHECK_THROWS_AS(resolve_spec(bad_inter, {"x", "w"}), input_error);
}

TEST_CASE("fit_ols recovers exact coefficients from a noise-free draw") {
  Rng rng(17);
  const Eigen::Index n = 64;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXi a(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    a[i] = rng.bernoulli_half();
    y[i] = 1.0 - x(i, 0) + a[i] * kSqrt2Pi * x(i, 0);
  }
  const ResolvedSpec resolved = resolve_spec(xx_spec(), {"x"});
  const FittedModel model = fit_ols(build_design(resolved, x, a), y);
  REQUIRE(model.coefficients.size() == 4);
  CHECK(model.coefficients[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(model.coefficients[1] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(model.coefficients[2] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(model.coefficients[3] == doctest::Approx(kSqrt2Pi).epsilon(1e-8));
  for (bool flag : model.aliased) CHECK_FALSE(flag);
}

TEST_CASE("fit_ols interpolates a saturated system with zero residuals") {
  const Eigen::MatrixXd design = Eigen::MatrixXd::Identity(5, 5);
  Eigen::VectorXd y(5);
  y << 3, -1, 4, -1, 5;
  const FittedModel model = fit_ols(design, y);
  CHECK((design * model.coefficients - y).norm() < 1e-12);
}

TEST_CASE("duplicated column is aliased and predictions are unchanged") {
  Rng rng(8);
  const Eigen::Index n = 40;
  Eigen::MatrixXd covariates(n, 2);
  Eigen::VectorXi a(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    covariates(i, 0) = rng.normal();
    covariates(i, 1) = covariates(i, 0);  // exact copy
    a[i] = rng.bernoulli_half();
    y[i] = 2.0 + covariates(i, 0) + 0.5 * a[i] + 0.1 * rng.normal();
  }
  ModelSpec dup;
  dup.main_covariates = {"x1", "x2"};
  const ResolvedSpec resolved_dup = resolve_spec(dup, {"x1", "x2"});
  const FittedModel with_dup =
      fit_ols(build_design(resolved_dup, covariates, a), y);
  CHECK(std::count(with_dup.aliased.begin(), with_dup.aliased.end(), true) == 1);

  ModelSpec single;
  single.main_covariates = {"x1"};
  const ResolvedSpec resolved_single = resolve_spec(single, {"x1", "x2"});
  const FittedModel without =
      fit_ols(build_design(resolved_single, covariates, a), y);

  for (Eigen::Index i = 0; i < 10; ++i) {
    const Eigen::RowVectorXd row = covariates.row(i);
    for (int arm = 0; arm <= 1; ++arm) {
      CHECK(predict(with_dup, resolved_dup, row, arm) ==
            doctest::Approx(predict(without, resolved_single, row, arm))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("fit_ols rejects non-finite and empty inputs") {
  Eigen::MatrixXd design = Eigen::MatrixXd::Ones(4, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  design(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fit_ols(design, y), input_error);
  design(1, 1) = 0.0;
  y[2] = std::nan("");
  CHECK_THROWS_AS(fit_ols(design, y), input_error);
  CHECK_THROWS_AS(fit_ols(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0)), input_error);
}

TEST_CASE("predict: contrast of the recovered model, zero model, a=0 row") {
  const ResolvedSpec resolved = resolve_spec(xx_spec(), {"x"});
  FittedModel model;
  model.coefficients.resize(4);
  model.coefficients << 1.0, -1.0, 0.0, kSqrt2Pi;
  model.aliased.assign(4, false);
  model.rank = 4;
  Eigen::RowVectorXd x(1);
  x << 1.0;
  CHECK(predict(model, resolved, x, 1) - predict(model, resolved, x, 0) ==
        doctest::Approx(kSqrt2Pi));
  CHECK(treatment_contrast(model, resolved, x) == doctest::Approx(kSqrt2Pi));

  FittedModel zero;
  zero.coefficients = Eigen::VectorXd::Zero(4);
  zero.aliased.assign(4, false);
  CHECK(predict(zero, resolved, x, 0) == 0.0);
  CHECK(predict(zero, resolved, x, 1) == 0.0);

  // under a=0 the gamma block cannot matter
  FittedModel gamma_heavy = model;
  gamma_heavy.coefficients[2] = 123.0;
  gamma_heavy.coefficients[3] = -456.0;
  CHECK(predict(gamma_heavy, resolved, x, 0) == predict(model, resolved, x, 0));
}

TEST_CASE("property: normal equations hold on retained columns") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 30 + static_cast<Eigen::Index>(rng.uniform_below(50));
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.uniform_below(6));
    Eigen::MatrixXd design(n, m);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) design(i, j) = rng.normal();
      y[i] = rng.normal();
    }
    const FittedModel model = fit_ols(design, y);
    const Eigen::VectorXd gram = design.transpose() * (y - design * model.coefficients);
    const double scale = std::max(1.0, y.norm() * design.norm());
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!model.aliased[static_cast<std::size_t>(j)]) {
        CHECK(std::abs(gram[j]) <= 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("property: shift and scale equivariance of the fit") {
  Rng rng(33);
  const Eigen::Index n = 50;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXi a(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    a[i] = rng.bernoulli_half();
    y[i] = 0.3 + 0.7 * x(i, 0) + a[i] * (0.2 - 0.4 * x(i, 0)) + rng.normal();
  }
  const ResolvedSpec resolved = resolve_spec(xx_spec(), {"x"});
  const Eigen::MatrixXd design = build_design(resolved, x, a);
  const FittedModel base = fit_ols(design, y);

  const double c = 2.75;
  const FittedModel shifted = fit_ols(design, y.array() + c);
  CHECK(shifted.coefficients[0] == doctest::Approx(base.coefficients[0] + c).epsilon(1e-10));
  for (Eigen::Index j = 1; j < 4; ++j) {
    CHECK(shifted.coefficients[j] == doctest::Approx(base.coefficients[j]).epsilon(1e-10));
  }
  Eigen::RowVectorXd probe(1);
  probe << 0.4;
  CHECK(predict(shifted, resolved, probe, 1) ==
        doctest::Approx(predict(base, resolved, probe, 1) + c).epsilon(1e-10));
  CHECK(treatment_contrast(shifted, resolved, probe) ==
        doctest::Approx(treatment_contrast(base, resolved, probe)).epsilon(1e-10));

  const FittedModel scaled = fit_ols(design, 3.0 * y);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(scaled.coefficients[j] == doctest::Approx(3.0 * base.coefficients[j]).epsilon(1e-10));
  }
}

TEST_CASE("property: treatment contrast equals the interaction block") {
  Rng rng(55);
  for (int trial = 0; trial < 8; ++trial) {
    FittedModel model;
    model.coefficients.resize(4);
    for (Eigen::Index j = 0; j < 4; ++j) model.coefficients[j] = rng.normal();
    model.aliased.assign(4, false);
    const ResolvedSpec resolved = resolve_spec(xx_spec(), {"x"});
    Eigen::RowVectorXd x(1);
    x << rng.normal(0.0, 3.0);
    const double direct = predict(model, resolved, x, 1) - predict(model, resolved, x, 0);
    const double expected = model.coefficients[2] + model.coefficients[3] * x[0];
    CHECK(direct == doctest::Approx(expected).epsilon(1e-12));
    CHECK(treatment_contrast(model, resolved, x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("model spec JSON round trip") {
  ModelSpec spec;
  spec.main_covariates = {"a", "b", "c"};
  spec.interaction_covariates = {"b"};
  spec.response_direction = Direction::lower_is_better;
  const ModelSpec back = model_spec_from_json(model_spec_to_json(spec));
  CHECK(back.main_covariates == spec.main_covariates);
  CHECK(back.interaction_covariates == spec.interaction_covariates);
  CHECK(back.response_direction == spec.response_direction);

  CHECK_THROWS_AS(model_spec_from_json(nlohmann::json{{"main", {"a"}}}), input_error);
  CHECK_THROWS_AS(model_spec_from_json(nlohmann::json{
                      {"main", {"a"}}, {"interactions", {"a"}}, {"direction", "up"}}),
                  input_error);
}
