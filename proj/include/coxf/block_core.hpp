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

#ifndef COXF_BLOCK_CORE_HPP_
#define COXF_BLOCK_CORE_HPP_

#include <variant>
#include <vector>

#include "coxf/types.hpp"

namespace coxf {

// A data matrix A in R^{r x t}, held either dense or as compressed sparse rows.
// Immutable after construction.
class DataMatrix {
 public:
  explicit DataMatrix(DenseMatrix values);
  // Compressed on construction; column indices within a row are increasing.
  explicit DataMatrix(SparseMatrix values);

  Index rows() const;
  Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(storage_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(storage_); }
  DenseMatrix to_dense() const;

  // Entries a matrix-vector product touches: rows*cols when dense, nnz when sparse.
  Index work() const;

  bool operator==(const DataMatrix& other) const;

 private:
  std::variant<DenseMatrix, SparseMatrix> storage_;
};

// Row blocks A_1..A_n of equal height ceil(r/n); trailing blocks are filled with
// pad_rows zero rows in total when n does not divide r.
struct BlockPartition {
  Index source_rows = 0;
  Index pad_rows = 0;
  std::vector<DataMatrix> blocks;

  Index block_count() const { return static_cast<Index>(blocks.size()); }
  Index block_rows() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  Index cols() const { return blocks.empty() ? 0 : blocks.front().cols(); }
};

BlockPartition partition(const DataMatrix& a, Index n);

// Vertical concatenation of the blocks with the padding dropped.
DataMatrix concatenate(const BlockPartition& p);

Vector block_multiply(const DataMatrix& block, const Eigen::Ref<const Vector>& x);

// Concatenates column-stacked block results (block_rows x n) and strips padding.
Vector stack_blocks(const DenseMatrix& block_results, Index source_rows);

}  // namespace coxf

#endif  // COXF_BLOCK_CORE_HPP_
