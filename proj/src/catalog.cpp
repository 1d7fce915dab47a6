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

#include "qsd/catalog.hpp"

#include <cmath>
#include <numbers>

namespace qsd {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVector qubit_ket(Complex a, Complex b) {
  ComplexVector v(2);
  v << a, b;
  return v;
}

constexpr double kTrineAzimuths[3] = {2.0 * kPi / 3.0, 0.0, -2.0 * kPi / 3.0};

}  // namespace

Ensemble trine_ensemble(double latitude) {
  std::vector<DensityMatrix> states;
  for (double phi : kTrineAzimuths) {
    states.push_back(DensityMatrix::from_ket(qubit_ket(
        std::cos(latitude), std::polar(std::sin(latitude), phi))));
  }
  return Ensemble(std::move(states));
}

Povm trine_measurement() {
  std::vector<ComplexMatrix> elements;
  const double s = 1.0 / std::sqrt(2.0);
  for (double phi : kTrineAzimuths) {
    elements.push_back((2.0 / 3.0) *
                       projector(qubit_ket(s, std::polar(s, phi))));
  }
  return Povm::assume_valid(std::move(elements));
}

Ensemble isosceles_ensemble(double theta0, double theta) {
  std::vector<DensityMatrix> states;
  for (double angle : {theta0 + theta, theta0, theta0 - theta}) {
    states.push_back(DensityMatrix::from_ket(
        qubit_ket(std::cos(angle / 2.0), std::sin(angle / 2.0))));
  }
  return Ensemble(std::move(states));
}

Ensemble equatorial_ensemble(std::size_t n) {
  std::vector<DensityMatrix> states;
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < n; ++k) {
    states.push_back(DensityMatrix::from_ket(
        qubit_ket(s, std::polar(s, 2.0 * kPi * k / n))));
  }
  return Ensemble(std::move(states));
}

}  // namespace qsd
