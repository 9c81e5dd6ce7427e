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

#ifndef COXF_CODES_HPP_
#define COXF_CODES_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coxf/block_core.hpp"
#include "coxf/types.hpp"

namespace coxf {

enum class CodeFamily { kSDiagonal, kOneDiagonal, kPBernoulli, kCross, kIdentity, kCustom };

std::string_view to_string(CodeFamily family);
CodeFamily parse_code_family(std::string_view name);

// Coefficients are drawn from {1, ..., size}.
inline constexpr Coefficient kDefaultCoefficientSetSize = 2147483647;  // 2^31 - 1

/// An m x n integer coding matrix. Row i says which blocks worker i combines:
/// the coded block is sum_j M(i,j) * A_j. Immutable after construction.
class CodingMatrix {
 public:
  CodingMatrix(CoefficientMatrix coefficients, CodeFamily family, std::uint64_t seed = 0);

  Index workers() const { return coefficients_.rows(); }
  Index blocks() const { return coefficients_.cols(); }
  CodeFamily family() const { return family_; }
  std::uint64_t seed() const { return seed_; }

  const CoefficientMatrix& coefficients() const { return coefficients_; }
  Coefficient operator()(Index worker, Index block) const { return coefficients_(worker, block); }

  std::vector<Index> row_support(Index worker) const;
  std::vector<Index> column_support(Index block) const;

  // M^U: the rows indexed by `subset`, in the given order.
  CoefficientMatrix rows(const std::vector<Index>& subset) const;

  // Straggler count the band structure was built for (m - n), diagonal families only.
  std::optional<Index> diagonal_width() const;

  bool operator==(const CodingMatrix& other) const {
    return family_ == other.family_ && seed_ == other.seed_ &&
           coefficients_ == other.coefficients_;
  }

 private:
  CoefficientMatrix coefficients_;
  CodeFamily family_;
  std::uint64_t seed_;
};

/// Everything needed to construct a code. Fields a family does not use stay empty.
struct CodeSpec {
  CodeFamily family = CodeFamily::kSDiagonal;
  Index n = 0;
  std::optional<Index> m;
  std::optional<Index> s;
  std::optional<double> p;
  std::optional<double> d1;
  std::optional<double> d2;
  Coefficient coefficient_set_size = kDefaultCoefficientSetSize;
  std::uint64_t seed = 0;

  // Worker count, with m = n + s (s-diagonal), n + 1 (one-diagonal), n (identity)
  // filled in when not given explicitly.
  Index workers() const;

  // Throws InvalidArgument naming the offending parameter.
  void validate() const;
};

CodingMatrix make_s_diagonal(Index n, Index m, Index s, Coefficient coefficient_set_size,
                             std::uint64_t seed);
CodingMatrix make_one_diagonal(Index n);
CodingMatrix make_p_bernoulli(Index n, Index m, double p, Coefficient coefficient_set_size,
                              std::uint64_t seed);
CodingMatrix make_cross(Index n, Index m, double d1, double d2,
                        Coefficient coefficient_set_size, std::uint64_t seed);
CodingMatrix make_identity(Index n);

CodingMatrix make_code(const CodeSpec& spec);

// ||M||_0.
Index computation_load(const CodingMatrix& m);

struct EncodedAssignment {
  Index worker_id = 0;
  DataMatrix coded_block;
  std::vector<Index> support;

  // A worker whose row of M is empty computes nothing useful.
  bool useless() const { return support.empty(); }
};

std::vector<EncodedAssignment> encode(const BlockPartition& partition, const CodingMatrix& m);

class RegenerationFailed : public std::runtime_error {
 public:
  RegenerationFailed(const std::string& what, std::vector<Index> witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  // A rank-deficient n-subset of workers from the last trial.
  const std::vector<Index>& witness() const { return witness_; }

 private:
  std::vector<Index> witness_;
};

struct Regenerated {
  CodingMatrix code;
  Index trials_used = 0;
};

// Redraws an s-diagonal code until every n x n submatrix is nonsingular, checked
// exhaustively and exactly. Trial t > 0 uses derive_seed(spec.seed, t).
Regenerated regenerate_until_valid(const CodeSpec& spec, Index max_trials);

}  // namespace coxf

#endif  // COXF_CODES_HPP_
