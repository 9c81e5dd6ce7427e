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

#ifndef COXF_TYPES_HPP_
#define COXF_TYPES_HPP_

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coxf {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Coding coefficients are plain integers; all structural math on them is exact.
using Coefficient = std::int64_t;
using CoefficientMatrix = Eigen::Matrix<Coefficient, Eigen::Dynamic, Eigen::Dynamic>;

// Bad caller input: shapes, flag combinations, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive subset enumeration would exceed the configured guard.
class EnumerationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The received results do not determine y = Ax. Carries how far decoding got.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, Index recovered_blocks, Index rooting_steps,
              Index peeling_steps)
      : std::runtime_error(what),
        recovered_blocks_(recovered_blocks),
        rooting_steps_(rooting_steps),
        peeling_steps_(peeling_steps) {}

  Index recovered_blocks() const { return recovered_blocks_; }
  Index rooting_steps() const { return rooting_steps_; }
  Index peeling_steps() const { return peeling_steps_; }

 private:
  Index recovered_blocks_;
  Index rooting_steps_;
  Index peeling_steps_;
};

}  // namespace coxf

#endif  // COXF_TYPES_HPP_
