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

#include "coxf/decoder.hpp"

namespace coxf {

std::string_view to_string(DecodeMethod method) {
  switch (method) {
    case DecodeMethod::kHybrid: return "hybrid";
    case DecodeMethod::kDiagonalSchedule: return "diagonal-schedule";
    case DecodeMethod::kInverse: return "inverse";
  }
  return "hybrid";
}

DecodeMethod parse_decode_method(std::string_view name) {
  if (name == "hybrid") return DecodeMethod::kHybrid;
  if (name == "diagonal-schedule" || name == "diagonal") return DecodeMethod::kDiagonalSchedule;
  if (name == "inverse") return DecodeMethod::kInverse;
  throw InvalidArgument("unknown decode method: " + std::string(name));
}

RationalVector rooting_vector(const CoefficientMatrix& msub, Index k0) {
  const Index n = msub.rows();
  if (msub.cols() != n) throw InvalidArgument("rooting needs a square submatrix");
  if (k0 < 0 || k0 >= n) throw InvalidArgument("rooting block index out of range");
  RationalVector e = RationalVector::Zero(n);
  e(k0) = 1;
  return solve_exact<Rational>(exact_cast<Rational>(msub.transpose()), std::move(e));
}

RationalMatrix coding_inverse(const CodingMatrix& code, const std::vector<Index>& subset) {
  if (static_cast<Index>(subset.size()) != code.blocks()) {
    throw InvalidArgument("inverse needs exactly n workers");
  }
  return inverse_exact<Rational>(exact_cast<Rational>(code.rows(subset)));
}

std::vector<Index> diagonal_root_schedule(const CodingMatrix& code,
                                          const std::vector<Index>& subset, Index s) {
  const Index n = code.blocks();
  const auto width = code.diagonal_width();
  if (!width) {
    throw InvalidArgument("diagonal schedule needs an s-diagonal code, got " +
                          std::string(to_string(code.family())));
  }
  if (*width != s) {
    throw InvalidArgument("code was built for s = " + std::to_string(*width) + ", not " +
                          std::to_string(s));
  }
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  for (Index w : subset) {
    if (w < 0 || w >= code.workers()) throw InvalidArgument("worker index out of range");
    if (w < n) covered[w] = 1;
  }
  std::vector<Index> roots;
  for (Index b = 0; b < n; ++b)
    if (!covered[b]) roots.push_back(b);
  return roots;
}

}  // namespace coxf
