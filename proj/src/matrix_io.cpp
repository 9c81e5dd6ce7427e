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

#include "coxf/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace coxf {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

DataMatrix read_matrix_market(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner)) throw InvalidArgument("empty Matrix Market stream");
  std::istringstream header(lower(banner));
  std::string tag, object, format, field, symmetry;
  header >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") {
    throw InvalidArgument("not a Matrix Market matrix header: " + banner);
  }
  if (field == "complex") throw InvalidArgument("complex Matrix Market files are not supported");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric" || symmetry == "skew-symmetric";
  const double mirror_sign = symmetry == "skew-symmetric" ? -1.0 : 1.0;

  std::string line;
  if (!next_data_line(in, line)) throw InvalidArgument("missing Matrix Market size line");
  std::istringstream sizes(line);

  if (format == "coordinate") {
    Index rows = 0, cols = 0, nnz = 0;
    if (!(sizes >> rows >> cols >> nnz)) throw InvalidArgument("bad coordinate size line");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    for (Index k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line)) throw InvalidArgument("truncated coordinate data");
      std::istringstream entry(line);
      Index i = 0, j = 0;
      double v = 1.0;
      entry >> i >> j;
      if (!pattern) entry >> v;
      if (!entry || i < 1 || j < 1 || i > rows || j > cols) {
        throw InvalidArgument("bad coordinate entry: " + line);
      }
      triplets.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j) triplets.emplace_back(j - 1, i - 1, mirror_sign * v);
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return DataMatrix(std::move(m));
  }
  if (format == "array") {
    Index rows = 0, cols = 0;
    if (!(sizes >> rows >> cols)) throw InvalidArgument("bad array size line");
    DenseMatrix m = DenseMatrix::Zero(rows, cols);
    // Column-major; symmetric arrays list only the lower triangle.
    for (Index j = 0; j < cols; ++j) {
      for (Index i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(in, line)) throw InvalidArgument("truncated array data");
        m(i, j) = std::stod(line);
        if (symmetric && i != j) m(j, i) = mirror_sign * m(i, j);
      }
    }
    return DataMatrix(std::move(m));
  }
  throw InvalidArgument("unknown Matrix Market format: " + format);
}

void write_matrix_market(std::ostream& out, const DataMatrix& m) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (m.is_sparse()) {
    const SparseMatrix& s = m.sparse();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << s.rows() << ' ' << s.cols() << ' ' << s.nonZeros() << '\n';
    for (Index r = 0; r < s.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
        out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
      }
    }
    return;
  }
  const DenseMatrix& d = m.dense();
  out << "%%MatrixMarket matrix array real general\n";
  out << d.rows() << ' ' << d.cols() << '\n';
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i) out << d(i, j) << '\n';
}

DataMatrix read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) throw InvalidArgument("non-numeric CSV field in line: " + line);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument("ragged CSV matrix");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("empty CSV matrix");
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return DataMatrix(std::move(m));
}

DataMatrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const int first = in.peek();
  if (first == '%') return read_matrix_market(in);
  return read_csv_matrix(in);
}

void write_matrix(const std::filesystem::path& path, const DataMatrix& m) {
  auto out = open_out(path);
  write_matrix_market(out, m);
}

Vector read_vector_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double v = 0.0;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) throw InvalidArgument("non-numeric vector entry: " + line);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

Vector read_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector_csv(in);
}

void write_vector_csv(std::ostream& out, const Eigen::Ref<const Vector>& v) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

void write_vector(const std::filesystem::path& path, const Eigen::Ref<const Vector>& v) {
  auto out = open_out(path);
  write_vector_csv(out, v);
}

}  // namespace coxf
