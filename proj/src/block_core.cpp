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

#include "coxf/block_core.hpp"

#include <algorithm>
#include <string>

namespace coxf {
namespace {

void check_shape(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("data matrix must have at least one row and one column");
  }
}

}  // namespace

DataMatrix::DataMatrix(DenseMatrix values) : storage_(std::move(values)) {
  check_shape(rows(), cols());
}

DataMatrix::DataMatrix(SparseMatrix values) {
  values.makeCompressed();
  storage_ = std::move(values);
  check_shape(rows(), cols());
}

Index DataMatrix::rows() const {
  return std::visit([](const auto& m) -> Index { return m.rows(); }, storage_);
}

Index DataMatrix::cols() const {
  return std::visit([](const auto& m) -> Index { return m.cols(); }, storage_);
}

DenseMatrix DataMatrix::to_dense() const {
  if (is_sparse()) return DenseMatrix(sparse());
  return dense();
}

Index DataMatrix::work() const {
  if (is_sparse()) return sparse().nonZeros();
  return rows() * cols();
}

bool DataMatrix::operator==(const DataMatrix& other) const {
  if (rows() != other.rows() || cols() != other.cols()) return false;
  return to_dense() == other.to_dense();
}

BlockPartition partition(const DataMatrix& a, Index n) {
  if (n < 1) throw InvalidArgument("block count must be at least 1");
  if (n > a.rows()) throw InvalidArgument("more blocks than rows");

  BlockPartition p;
  p.source_rows = a.rows();
  const Index height = (a.rows() + n - 1) / n;
  p.pad_rows = height * n - a.rows();
  p.blocks.reserve(static_cast<std::size_t>(n));

  for (Index b = 0; b < n; ++b) {
    const Index start = b * height;
    const Index take = std::max<Index>(0, std::min(height, a.rows() - start));
    if (a.is_sparse()) {
      SparseMatrix block(height, a.cols());
      if (take > 0) {
        SparseMatrix rows = a.sparse().middleRows(start, take);
        rows.conservativeResize(height, a.cols());
        block = std::move(rows);
      }
      p.blocks.emplace_back(std::move(block));
    } else {
      DenseMatrix block = DenseMatrix::Zero(height, a.cols());
      if (take > 0) block.topRows(take) = a.dense().middleRows(start, take);
      p.blocks.emplace_back(std::move(block));
    }
  }
  return p;
}

DataMatrix concatenate(const BlockPartition& p) {
  if (p.blocks.empty()) throw InvalidArgument("empty partition");
  const Index height = p.block_rows();
  const Index cols = p.cols();
  if (p.blocks.front().is_sparse()) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index b = 0; b < p.block_count(); ++b) {
      const SparseMatrix& block = p.blocks[b].sparse();
      for (Index r = 0; r < block.outerSize(); ++r) {
        const Index row = b * height + r;
        if (row >= p.source_rows) break;
        for (SparseMatrix::InnerIterator it(block, r); it; ++it) {
          triplets.emplace_back(row, it.col(), it.value());
        }
      }
    }
    SparseMatrix out(p.source_rows, cols);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return DataMatrix(std::move(out));
  }
  DenseMatrix out(height * p.block_count(), cols);
  for (Index b = 0; b < p.block_count(); ++b) {
    out.middleRows(b * height, height) = p.blocks[b].dense();
  }
  return DataMatrix(DenseMatrix(out.topRows(p.source_rows)));
}

Vector block_multiply(const DataMatrix& block, const Eigen::Ref<const Vector>& x) {
  if (block.cols() != x.size()) {
    throw InvalidArgument("block_multiply: matrix has " + std::to_string(block.cols()) +
                          " columns but vector has length " + std::to_string(x.size()));
  }
  if (block.is_sparse()) return block.sparse() * x;
  return block.dense() * x;
}

Vector stack_blocks(const DenseMatrix& block_results, Index source_rows) {
  const Index total = block_results.size();
  if (source_rows > total) throw InvalidArgument("stack_blocks: source rows exceed block data");
  return Eigen::Map<const Vector>(block_results.data(), total).head(source_rows);
}

}  // namespace coxf
