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

#pragma once

// JSON encoding of the numeric types. Complex scalars are two-element arrays
// [re, im]; matrices are row-major arrays of rows; kets are arrays of
// complex scalars.

#include <string>
#include <vector>

#include "json.hpp"
#include "qsd/operator_core.hpp"

namespace qsd {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
Json vector_to_json(const ComplexVector& v);
Json matrix_to_json(const ComplexMatrix& m);
Json povm_to_json(const Povm& povm);

// The decoders throw ParseError naming `field` when the shape or the types
// are wrong. A plain number is accepted wherever a complex scalar is.
Complex complex_from_json(const Json& j, const std::string& field);
ComplexVector vector_from_json(const Json& j, const std::string& field);
ComplexMatrix matrix_from_json(const Json& j, const std::string& field);
std::vector<ComplexMatrix> matrices_from_json(const Json& j,
                                              const std::string& field);

}  // namespace qsd
