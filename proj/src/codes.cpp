// Copyright 2026 The coxf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coxf/codes.hpp"

#include <cmath>
#include <string>

#include "coxf/analysis.hpp"
#include "coxf/rng.hpp"

namespace coxf {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

void check_common(Index n, Index m, Coefficient coefficient_set_size) {
  require(n >= 1, "n must be at least 1");
  require(m >= 1, "m must be at least 1");
  require(coefficient_set_size >= 1, "coefficient set size must be at least 1");
}

}  // namespace

std::string_view to_string(CodeFamily family) {
  switch (family) {
    case CodeFamily::kSDiagonal: return "s-diagonal";
    case CodeFamily::kOneDiagonal: return "one-diagonal";
    case CodeFamily::kPBernoulli: return "p-bernoulli";
    case CodeFamily::kCross: return "cross";
    case CodeFamily::kIdentity: return "identity";
    case CodeFamily::kCustom: return "custom";
  }
  return "custom";
}

CodeFamily parse_code_family(std::string_view name) {
  for (auto f : {CodeFamily::kSDiagonal, CodeFamily::kOneDiagonal, CodeFamily::kPBernoulli,
                 CodeFamily::kCross, CodeFamily::kIdentity, CodeFamily::kCustom}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument("unknown code family: " + std::string(name));
}

CodingMatrix::CodingMatrix(CoefficientMatrix coefficients, CodeFamily family,
                           std::uint64_t seed)
    : coefficients_(std::move(coefficients)), family_(family), seed_(seed) {
  require(coefficients_.rows() >= 1 && coefficients_.cols() >= 1,
          "coding matrix must be at least 1 x 1");
}

std::vector<Index> CodingMatrix::row_support(Index worker) const {
  std::vector<Index> out;
  for (Index j = 0; j < blocks(); ++j)
    if (coefficients_(worker, j) != 0) out.push_back(j);
  return out;
}

std::vector<Index> CodingMatrix::column_support(Index block) const {
  std::vector<Index> out;
  for (Index i = 0; i < workers(); ++i)
    if (coefficients_(i, block) != 0) out.push_back(i);
  return out;
}

CoefficientMatrix CodingMatrix::rows(const std::vector<Index>& subset) const {
  CoefficientMatrix out(static_cast<Index>(subset.size()), blocks());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    require(subset[k] >= 0 && subset[k] < workers(), "worker index out of range");
    out.row(static_cast<Index>(k)) = coefficients_.row(subset[k]);
  }
  return out;
}

std::optional<Index> CodingMatrix::diagonal_width() const {
  if (family_ != CodeFamily::kSDiagonal && family_ != CodeFamily::kOneDiagonal) {
    return std::nullopt;
  }
  return workers() - blocks();
}

Index CodeSpec::workers() const {
  if (m) return *m;
  switch (family) {
    case CodeFamily::kSDiagonal: return n + s.value_or(0);
    case CodeFamily::kOneDiagonal: return n + 1;
    case CodeFamily::kIdentity: return n;
    default: return 0;
  }
}

void CodeSpec::validate() const {
  require(n >= 1, "--n must be at least 1");
  require(coefficient_set_size >= 1, "--coeff-set-size must be at least 1");
  const Index workers_count = workers();
  switch (family) {
    case CodeFamily::kSDiagonal:
      require(s.has_value(), "s-diagonal code needs --s");
      require(*s >= 0, "--s must be non-negative");
      require(workers_count == n + *s, "s-diagonal code needs m = n + s");
      break;
    case CodeFamily::kOneDiagonal:
      require(workers_count == n + 1, "one-diagonal code has m = n + 1");
      break;
    case CodeFamily::kPBernoulli:
      require(m.has_value(), "p-bernoulli code needs --m");
      require(p.has_value(), "p-bernoulli code needs --p");
      require(*p > 0.0 && *p <= 1.0, "--p must lie in (0, 1]");
      require(workers_count >= 1, "--m must be at least 1");
      break;
    case CodeFamily::kCross:
      require(m.has_value(), "cross code needs --m");
      require(d1.has_value() && d2.has_value(), "cross code needs --d1 and --d2");
      require(workers_count >= 1, "--m must be at least 1");
      require(*d1 >= 1.0 && std::ceil(*d1) <= static_cast<double>(n),
              "--d1 must satisfy 1 <= d1 <= n");
      require(*d2 >= 1.0 && std::ceil(*d2) <= static_cast<double>(workers_count),
              "--d2 must satisfy 1 <= d2 <= m");
      break;
    case CodeFamily::kIdentity:
      require(workers_count == n, "identity code has m = n");
      break;
    case CodeFamily::kCustom:
      throw InvalidArgument("custom codes are loaded from a file, not constructed");
  }
}

CodingMatrix make_s_diagonal(Index n, Index m, Index s, Coefficient coefficient_set_size,
                             std::uint64_t seed) {
  check_common(n, m, coefficient_set_size);
  require(s >= 0, "s must be non-negative");
  require(m == n + s, "s-diagonal code needs m = n + s");
  Rng rng(seed);
  CoefficientMatrix c = CoefficientMatrix::Zero(m, n);
  // Worker i (0-based) combines blocks max(0, i - s) .. min(i, n - 1).
  for (Index i = 0; i < m; ++i) {
    for (Index j = std::max<Index>(0, i - s); j <= std::min(i, n - 1); ++j) {
      c(i, j) = rng.uniform_int(1, coefficient_set_size);
    }
  }
  return CodingMatrix(std::move(c), CodeFamily::kSDiagonal, seed);
}

CodingMatrix make_one_diagonal(Index n) {
  require(n >= 1, "n must be at least 1");
  CoefficientMatrix c = CoefficientMatrix::Zero(n + 1, n);
  for (Index j = 0; j < n; ++j) {
    c(j, j) = 1;
    c(j + 1, j) = 1;
  }
  return CodingMatrix(std::move(c), CodeFamily::kOneDiagonal, 0);
}

CodingMatrix make_p_bernoulli(Index n, Index m, double p, Coefficient coefficient_set_size,
                              std::uint64_t seed) {
  check_common(n, m, coefficient_set_size);
  require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
  Rng rng(seed);
  CoefficientMatrix c = CoefficientMatrix::Zero(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (rng.bernoulli(p)) c(i, j) = rng.uniform_int(1, coefficient_set_size);
    }
  }
  return CodingMatrix(std::move(c), CodeFamily::kPBernoulli, seed);
}

CodingMatrix make_cross(Index n, Index m, double d1, double d2,
                        Coefficient coefficient_set_size, std::uint64_t seed) {
  check_common(n, m, coefficient_set_size);
  require(d1 >= 1.0 && std::ceil(d1) <= static_cast<double>(n), "d1 must satisfy 1 <= d1 <= n");
  require(d2 >= 1.0 && std::ceil(d2) <= static_cast<double>(m), "d2 must satisfy 1 <= d2 <= m");
  Rng rng(seed);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> chosen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, n, false);
  for (Index i = 0; i < m; ++i) {
    for (Index j : rng.sample_without_replacement(n, draw_fractional_count(rng, d1))) {
      chosen(i, j) = true;
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i : rng.sample_without_replacement(m, draw_fractional_count(rng, d2))) {
      chosen(i, j) = true;
    }
  }
  CoefficientMatrix c = CoefficientMatrix::Zero(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (chosen(i, j)) c(i, j) = rng.uniform_int(1, coefficient_set_size);
  return CodingMatrix(std::move(c), CodeFamily::kCross, seed);
}

CodingMatrix make_identity(Index n) {
  require(n >= 1, "n must be at least 1");
  return CodingMatrix(CoefficientMatrix::Identity(n, n), CodeFamily::kIdentity, 0);
}

CodingMatrix make_code(const CodeSpec& spec) {
  spec.validate();
  const Index m = spec.workers();
  switch (spec.family) {
    case CodeFamily::kSDiagonal:
      return make_s_diagonal(spec.n, m, *spec.s, spec.coefficient_set_size, spec.seed);
    case CodeFamily::kOneDiagonal:
      return make_one_diagonal(spec.n);
    case CodeFamily::kPBernoulli:
      return make_p_bernoulli(spec.n, m, *spec.p, spec.coefficient_set_size, spec.seed);
    case CodeFamily::kCross:
      return make_cross(spec.n, m, *spec.d1, *spec.d2, spec.coefficient_set_size, spec.seed);
    case CodeFamily::kIdentity:
      return make_identity(spec.n);
    case CodeFamily::kCustom:
      break;
  }
  throw InvalidArgument("cannot construct a custom code");
}

Index computation_load(const CodingMatrix& m) {
  return (m.coefficients().array() != 0).count();
}

std::vector<EncodedAssignment> encode(const BlockPartition& partition, const CodingMatrix& m) {
  require(partition.block_count() == m.blocks(),
          "partition has " + std::to_string(partition.block_count()) +
              " blocks but the code expects " + std::to_string(m.blocks()));
  const Index height = partition.block_rows();
  const Index cols = partition.cols();
  const bool sparse = partition.blocks.front().is_sparse();

  std::vector<EncodedAssignment> out;
  out.reserve(static_cast<std::size_t>(m.workers()));
  for (Index i = 0; i < m.workers(); ++i) {
    auto support = m.row_support(i);
    if (sparse) {
      SparseMatrix sum(height, cols);
      for (Index j : support) {
        sum += static_cast<double>(m(i, j)) * partition.blocks[j].sparse();
      }
      out.push_back({i, DataMatrix(std::move(sum)), std::move(support)});
    } else {
      DenseMatrix sum = DenseMatrix::Zero(height, cols);
      for (Index j : support) {
        sum += static_cast<double>(m(i, j)) * partition.blocks[j].dense();
      }
      out.push_back({i, DataMatrix(std::move(sum)), std::move(support)});
    }
  }
  return out;
}

Regenerated regenerate_until_valid(const CodeSpec& spec, Index max_trials) {
  require(spec.family == CodeFamily::kSDiagonal || spec.family == CodeFamily::kOneDiagonal,
          "regenerate_until_valid applies to diagonal codes");
  require(max_trials >= 1, "max_trials must be at least 1");
  spec.validate();
  std::vector<Index> witness;
  for (Index t = 0; t < max_trials; ++t) {
    CodeSpec trial = spec;
    trial.seed = t == 0 ? spec.seed : derive_seed(spec.seed, static_cast<std::uint64_t>(t));
    CodingMatrix code = make_code(trial);
    auto bad = find_rank_deficient_subset(code, code.blocks());
    if (!bad) return {std::move(code), t + 1};
    witness = std::move(*bad);
  }
  throw RegenerationFailed("no valid code after " + std::to_string(max_trials) + " trials",
                           std::move(witness));
}

}  // namespace coxf
