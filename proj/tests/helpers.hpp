#pragma once

#include <unistd.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "treatval/dataset.hpp"
#include "treatval/rng.hpp"

namespace testutil {

inline treatval::RctDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                         const std::vector<int>& treatment,
                                         const std::vector<double>& response,
                                         std::vector<std::string> names) {
  treatval::RctDataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(names.size());
  data.covariates.resize(n, p);
  data.treatment.resize(n);
  data.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      data.covariates(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    data.treatment[i] = treatment[static_cast<std::size_t>(i)];
    data.response[i] = response[static_cast<std::size_t>(i)];
  }
  data.covariate_names = std::move(names);
  return data;
}

// Fresh path under the system temp dir; removed on destruction. Move-only so
// a moved-from handle does not delete the file underneath the new owner.
class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             (stem + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++)))
                .string();
  }
  TempFile(TempFile&& other) noexcept : path_(std::move(other.path_)) {
    other.path_.clear();
  }
  TempFile& operator=(TempFile&& other) noexcept {
    std::swap(path_, other.path_);
    return *this;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    if (path_.empty()) return;
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

  void write(const std::string& contents) const {
    std::ofstream f(path_);
    f << contents;
  }

 private:
  std::string path_;
};

// A trial shaped like a depression RCT: 154 subjects, the nine baseline
// covariates, a lower-is-better composite score as the response. Purely
// synthetic numbers.
inline treatval::RctDataset synthetic_depression_trial(std::uint64_t seed) {
  using treatval::Rng;
  Rng rng(seed);
  const Eigen::Index n = 154;
  treatval::RctDataset data;
  data.covariate_names = {"intake_HRSD", "iq_ship",       "age",
                          "chronic",     "married",       "unemployed",
                          "life_stressors", "pdstatus",   "drugs012"};
  data.covariates.resize(n, 9);
  data.treatment.resize(n);
  data.response.resize(n);
  std::vector<int> arms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) arms[static_cast<std::size_t>(i)] = i % 2;
  rng.shuffle(arms);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double intake = 18.0 + 4.0 * rng.normal();
    const double iq = 100.0 + 12.0 * rng.normal();
    const double age = 40.0 + 11.0 * rng.normal();
    const double chronic = rng.uniform() < 0.4 ? 1.0 : 0.0;
    const double married = rng.uniform() < 0.35 ? 1.0 : 0.0;
    const double unemployed = rng.uniform() < 0.25 ? 1.0 : 0.0;
    const double stressors = std::floor(rng.uniform() * 4.0);
    const double pdstatus = rng.uniform() < 0.3 ? 1.0 : 0.0;
    const double drugs = std::floor(rng.uniform() * 3.0);
    const int a = arms[static_cast<std::size_t>(i)];
    data.covariates.row(i) << intake, iq, age, chronic, married, unemployed,
        stressors, pdstatus, drugs;
    data.treatment[i] = a;
    // post-treatment score: improves with treatment for married/unemployed
    data.response[i] = 0.55 * intake - 0.02 * (iq - 100.0) + 2.0 * chronic +
                       a * (1.5 - 2.5 * married - 1.8 * unemployed +
                            0.6 * stressors) +
                       2.5 * rng.normal();
  }
  return data;
}

inline std::string dataset_to_csv(const treatval::RctDataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.covariate_names.size(); ++j) {
    out += data.covariate_names[j];
    out += ',';
  }
  out += "treatment,y\n";
  char buf[64];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", data.covariates(i, j));
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", data.treatment[i], data.response[i]);
    out += buf;
  }
  return out;
}

}  // namespace testutil
