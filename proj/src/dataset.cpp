#include "treatval/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "treatval/errors.hpp"

namespace treatval {

Eigen::Index RctDataset::arm_count(int arm) const {
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < treatment.size(); ++i) {
    if (treatment[i] == arm) ++c;
  }
  return c;
}

void validate_dataset(const RctDataset& data) {
  const Eigen::Index n = data.n();
  if (n < 4) {
    throw input_error("dataset has " + std::to_string(n) +
                      " rows; at least 4 are required");
  }
  if (data.covariates.rows() != n || data.treatment.size() != n) {
    throw input_error("covariates, treatment and response row counts disagree");
  }
  if (static_cast<Eigen::Index>(data.covariate_names.size()) != data.p()) {
    throw input_error("covariate_names length does not match covariate columns");
  }
  if (!data.covariates.allFinite() || !data.response.allFinite()) {
    throw input_error("dataset contains non-finite covariate or response values");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = data.treatment[i];
    if (a != 0 && a != 1) {
      throw input_error("treatment value " + std::to_string(a) + " at row " +
                        std::to_string(i + 1) + " is not 0 or 1");
    }
  }
  if (data.arm_count(0) < 2 || data.arm_count(1) < 2) {
    throw input_error("both treatment arms must have at least 2 subjects");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (ec != std::errc{} || ptr != last || cell.empty() || !std::isfinite(value)) {
    throw input_error("line " + std::to_string(line_no) + ", column '" + column +
                      "': cannot parse '" + std::string(cell) + "' as a finite number");
  }
  return value;
}

}  // namespace

RctDataset load_csv(const std::string& path, const std::string& treatment_column,
                    const std::string& response_column) {
  std::ifstream file(path);
  if (!file) {
    throw input_error("cannot open '" + path + "'");
  }

  std::string line;
  if (!std::getline(file, line)) {
    throw input_error("'" + path + "' is empty; a header row is required");
  }
  // Strip a UTF-8 BOM if present.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header_fields = split_fields(line);
  std::vector<std::string> header(header_fields.begin(), header_fields.end());
  {
    std::vector<std::string> sorted(header);
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
      throw input_error("duplicate column name '" + *dup + "' in '" + path +
                        "'; names must be unique to address covariates");
    }
  }

  auto column_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw input_error("column '" + name + "' not found in '" + path + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t treat_idx = column_index(treatment_column);
  const std::size_t resp_idx = column_index(response_column);
  if (treat_idx == resp_idx) {
    throw input_error("treatment and response columns must differ");
  }

  std::vector<std::string> names;
  std::vector<std::size_t> cov_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == treat_idx || j == resp_idx) continue;
    if (header[j].empty()) {
      throw input_error("'" + path + "' has an empty covariate column name");
    }
    names.push_back(header[j]);
    cov_cols.push_back(j);
  }

  std::vector<std::vector<double>> cov_rows;
  std::vector<int> treatment;
  std::vector<double> response;
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw input_error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    const double a = parse_cell(fields[treat_idx], line_no, treatment_column);
    if (a != 0.0 && a != 1.0) {
      throw input_error("line " + std::to_string(line_no) + ": treatment value '" +
                        std::string(fields[treat_idx]) + "' is not 0 or 1");
    }
    treatment.push_back(static_cast<int>(a));
    response.push_back(parse_cell(fields[resp_idx], line_no, response_column));
    std::vector<double> row(cov_cols.size());
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      row[k] = parse_cell(fields[cov_cols[k]], line_no, names[k]);
    }
    cov_rows.push_back(std::move(row));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(cov_rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(names.size());
  RctDataset data;
  data.covariates.resize(n, p);
  data.treatment.resize(n);
  data.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) data.covariates(i, j) = cov_rows[i][j];
    data.treatment[i] = treatment[i];
    data.response[i] = response[i];
  }
  data.covariate_names = std::move(names);
  validate_dataset(data);
  return data;
}

std::vector<std::vector<Eigen::Index>> FoldAssignment::fold_indices() const {
  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    folds[static_cast<std::size_t>(fold_of[i])].push_back(
        static_cast<Eigen::Index>(i));
  }
  return folds;
}

namespace {

// One random partition: shuffle indices, deal them round-robin so fold sizes
// differ by at most one. Returns true when every fold's complement contains
// both arms.
bool try_partition(const RctDataset& data, int K, Rng& rng, std::vector<int>& fold_of) {
  const Eigen::Index n = data.n();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  fold_of.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    fold_of[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % K);
  }
  // Training set for fold k misses an arm iff fold k contains that whole arm.
  std::vector<Eigen::Index> arm_in_fold0(static_cast<std::size_t>(K), 0);
  std::vector<Eigen::Index> arm_in_fold1(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(fold_of[static_cast<std::size_t>(i)]);
    (data.treatment[i] == 0 ? arm_in_fold0 : arm_in_fold1)[k]++;
  }
  const Eigen::Index n0 = data.arm_count(0);
  const Eigen::Index n1 = data.arm_count(1);
  for (int k = 0; k < K; ++k) {
    auto ku = static_cast<std::size_t>(k);
    if (arm_in_fold0[ku] == n0 || arm_in_fold1[ku] == n1) return false;
  }
  return true;
}

constexpr int kMaxFoldRedraws = 100;

}  // namespace

FoldAssignment make_folds(const RctDataset& data, int K, Rng& rng, std::ostream* warn) {
  if (K < 2) {
    throw input_error("K must be at least 2; got " + std::to_string(K));
  }
  const Eigen::Index n = data.n();
  const int requested = K;
  int effective = static_cast<int>(std::min<Eigen::Index>(K, n));

  FoldAssignment folds;
  folds.requested_K = requested;
  for (;;) {
    for (int attempt = 0; attempt < kMaxFoldRedraws; ++attempt) {
      if (try_partition(data, effective, rng, folds.fold_of)) {
        folds.K = effective;
        if (warn != nullptr && effective != requested) {
          *warn << "note: K reduced from " << requested << " to " << effective
                << " so every training set keeps both arms\n";
        }
        return folds;
      }
    }
    const int smaller_arm =
        static_cast<int>(std::min(data.arm_count(0), data.arm_count(1)));
    if (effective <= smaller_arm || smaller_arm < 2) {
      throw estimation_error(
          "could not build " + std::to_string(effective) +
          " folds whose training sets all contain both arms after " +
          std::to_string(kMaxFoldRedraws) + " redraws; try a smaller K");
    }
    effective = smaller_arm;
  }
}

RctDataset resample_with_replacement(const RctDataset& data, Rng& rng) {
  const Eigen::Index n = data.n();
  const auto un = static_cast<std::uint64_t>(n);
  RctDataset out;
  out.covariates.resize(n, data.p());
  out.treatment.resize(n);
  out.response.resize(n);
  out.covariate_names = data.covariate_names;

  // A resample concentrated in one arm cannot be fit or cross-tabulated, so
  // draw again until both arms have >= 2 rows (cap guards against adversarial
  // inputs; post-validation data makes exhaustion essentially impossible).
  constexpr int kMaxResampleRedraws = 1000;
  for (int attempt = 0; attempt < kMaxResampleRedraws; ++attempt) {
    Eigen::Index ones = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto src = static_cast<Eigen::Index>(rng.uniform_below(un));
      out.covariates.row(i) = data.covariates.row(src);
      out.treatment[i] = data.treatment[src];
      out.response[i] = data.response[src];
      ones += out.treatment[i];
    }
    if (ones >= 2 && n - ones >= 2) return out;
  }
  throw estimation_error("resampling kept producing single-arm datasets");
}

}  // namespace treatval
