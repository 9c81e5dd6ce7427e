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

#ifndef COXF_MATRIX_IO_HPP_
#define COXF_MATRIX_IO_HPP_

#include <filesystem>
#include <iosfwd>

#include "coxf/block_core.hpp"

namespace coxf {

// Matrix Market "coordinate" (-> sparse) or "array" (-> dense); real, integer
// or pattern fields; general or symmetric.
DataMatrix read_matrix_market(std::istream& in);
void write_matrix_market(std::ostream& out, const DataMatrix& m);

// Comma- or whitespace-separated rows of numbers; '#' starts a comment.
DataMatrix read_csv_matrix(std::istream& in);

// Dispatches on the "%%MatrixMarket" banner, falling back to CSV.
DataMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const DataMatrix& m);

// One value per line, printed with round-trip precision.
Vector read_vector_csv(std::istream& in);
Vector read_vector(const std::filesystem::path& path);
void write_vector_csv(std::ostream& out, const Eigen::Ref<const Vector>& v);
void write_vector(const std::filesystem::path& path, const Eigen::Ref<const Vector>& v);

}  // namespace coxf

#endif  // COXF_MATRIX_IO_HPP_
