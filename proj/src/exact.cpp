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

#include "coxf/exact.hpp"

namespace coxf {
namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kPrime) s -= kPrime;
  return s;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base);
    base = mul_mod(base, base);
    exp >>= 1;
  }
  return result;
}

std::uint64_t to_field(Coefficient c) {
  const auto r = static_cast<std::int64_t>(c % static_cast<std::int64_t>(kPrime));
  return r < 0 ? static_cast<std::uint64_t>(r + static_cast<std::int64_t>(kPrime))
               : static_cast<std::uint64_t>(r);
}

}  // namespace

Index modular_rank(const CoefficientMatrix& m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic> a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = to_field(m(i, j));

  Index rank = 0;
  for (Index col = 0; col < cols && rank < rows; ++col) {
    Index pivot = rank;
    while (pivot < rows && a(pivot, col) == 0) ++pivot;
    if (pivot == rows) continue;
    a.row(pivot).swap(a.row(rank));
    const std::uint64_t inv = pow_mod(a(rank, col), kPrime - 2);
    for (Index i = rank + 1; i < rows; ++i) {
      if (a(i, col) == 0) continue;
      const std::uint64_t f = mul_mod(a(i, col), inv);
      for (Index j = col; j < cols; ++j) {
        const std::uint64_t sub = mul_mod(f, a(rank, j));
        a(i, j) = a(i, j) >= sub ? a(i, j) - sub : a(i, j) + kPrime - sub;
      }
    }
    ++rank;
  }
  return rank;
}

bool has_full_column_rank(const CoefficientMatrix& m) {
  if (m.rows() < m.cols()) return false;
  if (modular_rank(m) == m.cols()) return true;
  return exact_rank(m) == m.cols();
}

std::vector<Index> independent_rows(const CoefficientMatrix& m) {
  // Row echelon basis over Q, grown one candidate row at a time.
  const Index cols = m.cols();
  std::vector<RationalVector> basis;
  std::vector<Index> pivot_col;
  std::vector<Index> chosen;
  for (Index i = 0; i < m.rows() && static_cast<Index>(chosen.size()) < cols; ++i) {
    RationalVector v(cols);
    for (Index j = 0; j < cols; ++j) v(j) = Rational(m(i, j));
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const Index pc = pivot_col[b];
      if (v(pc) != 0) {
        const Rational f = v(pc) / basis[b](pc);
        v -= f * basis[b];
      }
    }
    Index lead = 0;
    while (lead < cols && v(lead) == 0) ++lead;
    if (lead == cols) continue;
    basis.push_back(v);
    pivot_col.push_back(lead);
    chosen.push_back(i);
  }
  return chosen;
}

}  // namespace coxf
