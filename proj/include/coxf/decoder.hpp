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

#ifndef COXF_DECODER_HPP_
#define COXF_DECODER_HPP_

// Recovery of y = Ax from n worker results.
//
// Structure (which block to recover next, rooting combinations, inverses) is
// decided in exact arithmetic on the integer coding matrix. The data path is a
// template parameter: double for real workloads, Rational when an end-to-end
// exact decode is wanted.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "coxf/codes.hpp"
#include "coxf/exact.hpp"
#include "coxf/rng.hpp"
#include "coxf/types.hpp"

namespace coxf {

enum class DecodeMethod { kHybrid, kDiagonalSchedule, kInverse };

std::string_view to_string(DecodeMethod method);
DecodeMethod parse_decode_method(std::string_view name);

// Which unrecovered block a rooting step targets when no ripple exists.
enum class RootSelection { kLowestIndex, kRandom };

struct DecodeOptions {
  RootSelection root_selection = RootSelection::kLowestIndex;
  std::uint64_t seed = 0;
};

/// Results of n distinct workers. Column k of `results` is the result of
/// worker subset()[k]; the constructor sorts workers and permutes columns to
/// match.
template <typename Scalar>
class BasicReceivedSet {
 public:
  BasicReceivedSet(const CodingMatrix& code, std::vector<Index> subset, MatrixX<Scalar> results,
                   Index output_rows)
      : code_(&code), output_rows_(output_rows) {
    const Index n = code.blocks();
    if (static_cast<Index>(subset.size()) != n) {
      throw InvalidArgument("received set needs exactly n = " + std::to_string(n) + " workers");
    }
    if (results.cols() != n) throw InvalidArgument("one result column per received worker");
    std::vector<Index> order(subset.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return subset[a] < subset[b]; });
    subset_.resize(subset.size());
    results_.resize(results.rows(), n);
    for (Index k = 0; k < n; ++k) {
      subset_[k] = subset[order[k]];
      results_.col(k) = results.col(order[k]);
    }
    for (Index k = 0; k < n; ++k) {
      if (subset_[k] < 0 || subset_[k] >= code.workers()) {
        throw InvalidArgument("worker index out of range");
      }
      if (k > 0 && subset_[k] == subset_[k - 1]) throw InvalidArgument("duplicate worker");
    }
    if (output_rows_ < 1 || output_rows_ > results_.rows() * n) {
      throw InvalidArgument("output rows inconsistent with block results");
    }
  }

  const CodingMatrix& code() const { return *code_; }
  const std::vector<Index>& subset() const { return subset_; }
  const MatrixX<Scalar>& results() const { return results_; }
  Index block_rows() const { return results_.rows(); }
  Index output_rows() const { return output_rows_; }

 private:
  const CodingMatrix* code_;
  std::vector<Index> subset_;
  MatrixX<Scalar> results_;
  Index output_rows_;
};

template <typename Scalar>
struct BasicDecodeReport {
  DecodeMethod method = DecodeMethod::kHybrid;
  // block_rows x n; column j holds A_j x.
  MatrixX<Scalar> blocks;
  // Blocks concatenated, padding stripped.
  VectorX<Scalar> output;
  Index rooting_steps = 0;
  Index peeling_steps = 0;
  // Multiply-adds on block entries: one per entry for each peel, subtraction
  // and rooting term.
  Index scalar_ops = 0;
  std::vector<Index> rooted_blocks;
  // ||M^U X - Y|| / ||Y||: how well the recovered blocks re-encode to the input.
  double residual = 0.0;
};

using ReceivedSet = BasicReceivedSet<double>;
using DecodeReport = BasicDecodeReport<double>;

// Exact u with msub^T u = e_k0, so that A_k0 x = sum_k u_k y_k.
// Throws SingularMatrix when msub is singular.
RationalVector rooting_vector(const CoefficientMatrix& msub, Index k0);

// (M^U)^{-1} over the rationals.
RationalMatrix coding_inverse(const CodingMatrix& code, const std::vector<Index>& subset);

namespace detail {

template <typename Scalar>
double relative_residual(const CoefficientMatrix& msub, const MatrixX<Scalar>& blocks,
                         const MatrixX<Scalar>& results) {
  // Y = X M^T in block-column form.
  const MatrixX<Scalar> coeffs = msub.transpose().template cast<Scalar>();
  const MatrixX<Scalar> diff = blocks * coeffs - results;
  double num = 0.0, den = 0.0;
  for (Index j = 0; j < diff.cols(); ++j) {
    for (Index i = 0; i < diff.rows(); ++i) {
      const double d = static_cast<double>(diff(i, j));
      const double y = static_cast<double>(results(i, j));
      num += d * d;
      den += y * y;
    }
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

template <typename Scalar>
void finish_report(const BasicReceivedSet<Scalar>& rx, const CoefficientMatrix& msub,
                   BasicDecodeReport<Scalar>& report) {
  const Index total = report.blocks.size();
  report.output = Eigen::Map<const VectorX<Scalar>>(report.blocks.data(), total)
                      .head(rx.output_rows());
  report.residual = relative_residual(msub, report.blocks, rx.results());
}

// Algorithm shared by the hybrid and diagonal-schedule decoders: root the
// `forced_roots` first, then repeatedly peel the lowest-index singleton row,
// rooting one block whenever no singleton exists.
template <typename Scalar>
BasicDecodeReport<Scalar> peel_and_root(const BasicReceivedSet<Scalar>& rx,
                                        const std::vector<Index>& forced_roots,
                                        DecodeMethod method, const DecodeOptions& options) {
  const CodingMatrix& code = rx.code();
  const Index n = code.blocks();
  const Index h = rx.block_rows();
  const CoefficientMatrix original = code.rows(rx.subset());
  CoefficientMatrix live = original;
  MatrixX<Scalar> residual = rx.results();

  BasicDecodeReport<Scalar> report;
  report.method = method;
  report.blocks = MatrixX<Scalar>::Zero(h, n);

  std::vector<char> recovered(static_cast<std::size_t>(n), 0);
  std::vector<char> consumed(static_cast<std::size_t>(n), 0);
  std::vector<Index> row_nnz(static_cast<std::size_t>(n), 0);
  for (Index r = 0; r < n; ++r) row_nnz[r] = (original.row(r).array() != 0).count();
  Index done = 0;
  Rng rng(options.seed);

  auto absorb = [&](Index block) {
    recovered[block] = 1;
    ++done;
    // Nothing reads the residuals once the last block is known.
    if (done == n) return;
    for (Index r = 0; r < n; ++r) {
      if (consumed[r] || live(r, block) == 0) continue;
      residual.col(r) -= Scalar(live(r, block)) * report.blocks.col(block);
      report.scalar_ops += h;
      live(r, block) = 0;
      --row_nnz[r];
    }
  };

  // A rooting step works on the current residual system: the unconsumed rows
  // restricted to the blocks still unknown. That system has full column rank
  // whenever M^U does, and its combination touches at most one result per
  // unknown block rather than all n.
  auto root = [&](Index block) {
    if (recovered[block]) return;
    std::vector<Index> rows, cols;
    for (Index r = 0; r < n; ++r)
      if (!consumed[r]) rows.push_back(r);
    for (Index c = 0; c < n; ++c)
      if (!recovered[c]) cols.push_back(c);
    const Index unknown = static_cast<Index>(cols.size());
    CoefficientMatrix reduced(static_cast<Index>(rows.size()), unknown);
    for (Index a = 0; a < reduced.rows(); ++a)
      for (Index b = 0; b < unknown; ++b) reduced(a, b) = live(rows[a], cols[b]);
    const std::vector<Index> basis = independent_rows(reduced);
    if (static_cast<Index>(basis.size()) < unknown) {
      throw DecodeError("not decodable from this subset", done, report.rooting_steps,
                        report.peeling_steps);
    }
    CoefficientMatrix square(unknown, unknown);
    for (Index k = 0; k < unknown; ++k) square.row(k) = reduced.row(basis[k]);
    const Index target = static_cast<Index>(
        std::find(cols.begin(), cols.end(), block) - cols.begin());
    const RationalVector u = rooting_vector(square, target);
    VectorX<Scalar> acc = VectorX<Scalar>::Zero(h);
    for (Index k = 0; k < unknown; ++k) {
      if (u(k) == 0) continue;
      acc += scalar_from_rational<Scalar>(u(k)) * residual.col(rows[basis[k]]);
      report.scalar_ops += h;
    }
    report.blocks.col(block) = acc;
    ++report.rooting_steps;
    report.rooted_blocks.push_back(block);
    absorb(block);
  };

  for (Index b : forced_roots) root(b);

  while (done < n) {
    Index ripple = -1;
    for (Index r = 0; r < n; ++r) {
      if (!consumed[r] && row_nnz[r] == 1) {
        ripple = r;
        break;
      }
    }
    if (ripple >= 0) {
      Index block = 0;
      while (live(ripple, block) == 0) ++block;
      report.blocks.col(block) = residual.col(ripple) / Scalar(live(ripple, block));
      report.scalar_ops += h;
      consumed[ripple] = 1;
      live(ripple, block) = 0;
      row_nnz[ripple] = 0;
      ++report.peeling_steps;
      absorb(block);
      continue;
    }
    std::vector<Index> pending;
    for (Index b = 0; b < n; ++b)
      if (!recovered[b]) pending.push_back(b);
    const Index pick =
        options.root_selection == RootSelection::kRandom
            ? pending[rng.uniform_below(static_cast<std::uint64_t>(pending.size()))]
            : pending.front();
    root(pick);
  }

  finish_report(rx, original, report);
  return report;
}

}  // namespace detail

/// Peeling decoder with rooting fallback. Throws DecodeError when M^U is
/// singular, reporting how many blocks were recovered before that.
template <typename Scalar>
BasicDecodeReport<Scalar> hybrid_decode(const BasicReceivedSet<Scalar>& received,
                                        const DecodeOptions& options = {}) {
  return detail::peel_and_root(received, {}, DecodeMethod::kHybrid, options);
}

// Blocks [n] \ {i_1..i_k}, where i_1 < ... < i_k are the received workers that
// are at most n (1-based), for an s-diagonal code with m = n + s. Rooting those
// first leaves a pure peeling cascade, so at most s rooting steps are used.
std::vector<Index> diagonal_root_schedule(const CodingMatrix& code,
                                          const std::vector<Index>& subset, Index s);

template <typename Scalar>
BasicDecodeReport<Scalar> diagonal_decode(const BasicReceivedSet<Scalar>& received, Index s) {
  const auto roots = diagonal_root_schedule(received.code(), received.subset(), s);
  return detail::peel_and_root(received, roots, DecodeMethod::kDiagonalSchedule, {});
}

/// Reference decoder: exact (M^U)^{-1} applied to the stacked results.
template <typename Scalar>
BasicDecodeReport<Scalar> inverse_decode(const BasicReceivedSet<Scalar>& received) {
  const CodingMatrix& code = received.code();
  const Index n = code.blocks();
  RationalMatrix inverse;
  try {
    inverse = coding_inverse(code, received.subset());
  } catch (const SingularMatrix&) {
    throw DecodeError("not decodable from this subset", 0, 0, 0);
  }
  MatrixX<Scalar> inv(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) inv(i, j) = scalar_from_rational<Scalar>(inverse(i, j));

  BasicDecodeReport<Scalar> report;
  report.method = DecodeMethod::kInverse;
  report.blocks = received.results() * inv.transpose();
  report.scalar_ops = n * n * received.block_rows();
  detail::finish_report(received, code.rows(received.subset()), report);
  return report;
}

}  // namespace coxf

#endif  // COXF_DECODER_HPP_
