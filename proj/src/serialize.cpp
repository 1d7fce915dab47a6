// Copyright 2026 The qsd Authors
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


#include "qsd/serialize.hpp"

#include "qsd/errors.hpp"

namespace qsd {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + why);
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Json povm_to_json(const Povm& povm) {
  Json out = Json::array();
  for (const auto& e : povm.elements()) out.push_back(matrix_to_json(e));
  return out;
}

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad_field(field, "expected a number or [re, im]");
}

ComplexVector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad_field(field, "expected a nonempty array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) =
        complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad_field(field, "expected an array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) bad_field(field, "row " + std::to_string(r) +
                                               " is not an array");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols || cols == 0) {
      bad_field(field, "rows must be nonempty and of equal length");
    }
  }
  ComplexMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(
          j[r][c],
          field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<ComplexMatrix> matrices_from_json(const Json& j,
                                              const std::string& field) {
  if (!j.is_array() || j.empty()) {
    bad_field(field, "expected a nonempty array of matrices");
  }
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(matrix_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace qsd
