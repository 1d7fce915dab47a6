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

// Chernoff exponents and many-copy error behaviour: quantum and classical
// Chernoff bounds, exact tensor-power Helstrom errors, the multi-state
// sandwich, and classical post-processing of repeated single-copy
// measurements.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qsd/minerror.hpp"
#include "qsd/operator_core.hpp"

namespace qsd {

struct ChernoffResult {
  double xi = 0.0;       // nats; +infinity for disjoint supports
  double s_star = 0.0;   // minimizer in [0, 1]
  double minimum = 1.0;  // min_s of the curve
  bool disjoint_supports = false;
  // Set when the 101-point grid found a value below the refined minimum by
  // more than 1e-9 (the curve is then not unimodal enough to trust).
  bool grid_warning = false;
  std::vector<std::pair<double, double>> trace_curve;  // (s, value), 101 pts
};

// xi = -log min_s tr[rho1^s rho2^{1-s}] with 0^s = 0 on kernels.
ChernoffResult chernoff_two(const DensityMatrix& rho1,
                            const DensityMatrix& rho2);
// Same for distributions; throws NotDistribution.
ChernoffResult chernoff_classical(std::span<const double> p0,
                                  std::span<const double> p1);

struct MultiChernoff {
  double xi = 0.0;
  std::size_t first = 0;  // pair attaining the minimum
  std::size_t second = 1;
};
// Minimum over unordered pairs; throws WrongCount for fewer than two states.
MultiChernoff chernoff_multi(std::span<const DensityMatrix> states);

struct ExponentEstimate {
  std::vector<int> n_values;
  std::vector<double> error_probs;
  std::vector<double> rates;  // -(1/n) log p_error,n (inf when p = 0)
  // Least-squares slope of -log p_error,n against n over the last half of
  // the range; +inf when the errors vanish.
  double fitted_exponent = 0.0;
  double fit_residual = 0.0;  // RMS residual of that fit
};

// p_error,n = 1 - Helstrom(rho1^n, rho2^n) for n = 1..n_max.
ExponentEstimate finite_n_error(const DensityMatrix& rho1,
                                const DensityMatrix& rho2, double q1,
                                double q2, int n_max,
                                std::size_t cap = kDefaultDimensionCap);

struct SandwichReport {
  double lower = 0.0;      // xi / 3
  double empirical = 0.0;  // fitted exponent of the n-copy errors
  double upper = 0.0;      // xi (pairwise minimum)
  bool within_bounds = false;
  ExponentEstimate trend;
};

// Equal priors over the given states; errors of n' copies for n' = 1..n from
// the fixed-point solver (Helstrom for two states).
SandwichReport sandwich_check(std::span<const DensityMatrix> states, int n,
                              std::size_t cap = kDefaultDimensionCap,
                              const FixedPointOptions& options = {});

// Error of measuring each of n copies with the same POVM and deciding by
// maximum posterior on the outcome counts (exact enumeration).
double repeated_measurement_sim(const Ensemble& ensemble, const Povm& povm,
                                  int n);

}  // namespace qsd
