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

// Named qubit ensembles and measurements that recur throughout the toolkit,
// its tests and its bundled scenarios.

#include <cstddef>

#include "qsd/operator_core.hpp"

namespace qsd {

// Equiprobable trine at latitude t: cos t |0> + e^{i phi_k} sin t |1> with
// azimuths phi = (2 pi/3, 0, -2 pi/3). t = pi/4 puts the states on the
// equator.
Ensemble trine_ensemble(double latitude);

// Three equiprobable equatorial measurement directions
// (|0> + e^{i phi_k}|1>)/sqrt 2 weighted 2/3, ordered to match the azimuths
// of trine_ensemble.
Povm trine_measurement();

// Equiprobable isosceles triple in the x-z plane with Bloch polar angles
// t0 + t, t0 and t0 - t (kets use the half angles).
Ensemble isosceles_ensemble(double theta0, double theta);

// n equiprobable pure states spaced evenly around the Bloch equator.
Ensemble equatorial_ensemble(std::size_t n);

}  // namespace qsd
