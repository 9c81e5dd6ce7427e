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

#ifndef COXF_EXACT_HPP_
#define COXF_EXACT_HPP_

// Exact linear algebra over the integers and rationals.
//
// Rank and singularity decisions about coding matrices are made here and never
// in floating point. The kernels are templates over the scalar so the same
// elimination serves BigInt (fraction-free) and Rational (Gauss-Jordan) use.

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cstdint>
#include <type_traits>
#include <utility>
#include <vector>

#include "coxf/types.hpp"

// Eigen 3.4 dense types declare `const_iterator` as void, which Boost's
// byte-container probe dereferences through iterator_traits when Eigen asks
// whether a matrix converts to a multiprecision scalar. Such types are never
// byte containers.
namespace boost::multiprecision::detail {
template <class C>
  requires std::is_void_v<typename C::const_iterator>
struct is_byte_container_imp<C, true> : boost::false_type {};
}  // namespace boost::multiprecision::detail

namespace coxf {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using BigIntMatrix = MatrixX<BigInt>;
using RationalMatrix = MatrixX<Rational>;
using RationalVector = VectorX<Rational>;

template <typename Target, typename Derived>
MatrixX<Target> exact_cast(const Eigen::MatrixBase<Derived>& m) {
  MatrixX<Target> out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = Target(m(i, j));
  return out;
}

// Rational -> data scalar. double rounds to nearest; Rational is the identity.
template <typename Scalar>
Scalar scalar_from_rational(const Rational& q) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return q;
  } else {
    return q.template convert_to<Scalar>();
  }
}

template <typename Ring>
struct FractionFreeResult {
  Index rank = 0;
  // Determinant of the leading rank x rank pivot minor, with row-swap sign.
  Ring determinant = Ring(0);
  // Original row index of each pivot, in elimination order.
  std::vector<Index> pivot_rows;
};

// Bareiss elimination in place. After step k every active entry is a
// (k+1)x(k+1) minor of the input, so each division by the previous pivot is
// exact. Columns without a pivot are skipped, which keeps that property.
template <typename Ring>
FractionFreeResult<Ring> fraction_free_eliminate(MatrixX<Ring>& a) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  std::vector<Index> order(static_cast<std::size_t>(rows));
  for (Index i = 0; i < rows; ++i) order[i] = i;

  FractionFreeResult<Ring> result;
  Ring previous(1);
  bool negate = false;
  for (Index col = 0; col < cols && result.rank < rows; ++col) {
    const Index top = result.rank;
    Index pivot = top;
    while (pivot < rows && a(pivot, col) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != top) {
      a.row(pivot).swap(a.row(top));
      std::swap(order[pivot], order[top]);
      negate = !negate;
    }
    const Ring p = a(top, col);
    for (Index i = top + 1; i < rows; ++i) {
      const Ring factor = a(i, col);
      for (Index j = col + 1; j < cols; ++j) {
        a(i, j) = (p * a(i, j) - factor * a(top, j)) / previous;
      }
      a(i, col) = 0;
    }
    previous = p;
    result.pivot_rows.push_back(order[top]);
    ++result.rank;
  }
  result.determinant = negate ? Ring(-previous) : previous;
  return result;
}

template <typename Derived>
Index exact_rank(const Eigen::MatrixBase<Derived>& m) {
  BigIntMatrix a = exact_cast<BigInt>(m);
  return fraction_free_eliminate(a).rank;
}

template <typename Derived>
BigInt exact_determinant(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant of a non-square matrix");
  if (m.rows() == 0) return BigInt(1);
  BigIntMatrix a = exact_cast<BigInt>(m);
  const auto r = fraction_free_eliminate(a);
  return r.rank == m.rows() ? r.determinant : BigInt(0);
}

// Solves a * x = b by Gauss-Jordan over an exact field.
template <typename Field>
VectorX<Field> solve_exact(MatrixX<Field> a, VectorX<Field> b) {
  const Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw InvalidArgument("solve_exact: shape mismatch");
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) throw SingularMatrix("matrix is singular");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b(pivot), b(col));
    }
    const Field inv = Field(1) / a(col, col);
    for (Index j = col; j < n; ++j) a(col, j) *= inv;
    b(col) *= inv;
    for (Index i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      const Field f = a(i, col);
      for (Index j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b(i) -= f * b(col);
    }
  }
  return b;
}

template <typename Field>
MatrixX<Field> inverse_exact(MatrixX<Field> a) {
  const Index n = a.rows();
  if (a.cols() != n) throw InvalidArgument("inverse_exact: matrix is not square");
  MatrixX<Field> inv = MatrixX<Field>::Identity(n, n);
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) throw SingularMatrix("matrix is singular");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const Field s = Field(1) / a(col, col);
    a.row(col) *= s;
    inv.row(col) *= s;
    for (Index i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      const Field f = a(i, col);
      a.row(i) -= f * a.row(col);
      inv.row(i) -= f * inv.row(col);
    }
  }
  return inv;
}

// Rank over GF(p), p = 2^61 - 1. Never exceeds the rank over the integers.
Index modular_rank(const CoefficientMatrix& m);

// rank(m) == m.cols(), decided exactly. The modular rank is tried first; a
// full modular rank certifies full integer rank, anything else falls back to
// fraction-free elimination.
bool has_full_column_rank(const CoefficientMatrix& m);

// Greedy choice of rows, scanned in order, that are linearly independent.
// Returns the chosen row indices (at most m.cols()).
std::vector<Index> independent_rows(const CoefficientMatrix& m);

}  // namespace coxf

#endif  // COXF_EXACT_HPP_
