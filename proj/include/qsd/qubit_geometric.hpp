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

// Exact minimum-error discrimination of qubit ensembles. The dual constraint
// K >= q_i rho_i with K = (t I + b.sigma)/2 is the scalar condition
// t - q_i >= |b - q_i v_i|, so the dual optimum is the smallest ball
// containing the balls B(q_i v_i, q_i), solved exactly by support-set
// enumeration.

#include <cstddef>
#include <optional>
#include <vector>

#include "qsd/minerror.hpp"
#include "qsd/operator_core.hpp"

namespace qsd {

inline constexpr double kGeometricTolerance = 1e-9;
inline constexpr double kActiveThreshold = 1e-7;  // |w_i| >= 1 - this

struct WeightedBlochBall {
  BlochVector center;  // q_i v_i
  double weight = 0.0;  // q_i, also the ball radius
};

struct EnclosingBall {
  BlochVector center = BlochVector::Zero();  // b
  double radius = 0.0;                       // t = tr K
  std::vector<std::size_t> support;          // balls touching the boundary
};

struct QubitSolution {
  double p_guess = 0.0;
  EnclosingBall ball;
  // w_i = (b - q_i v_i) / (t - q_i); absent where t - q_i vanishes.
  std::vector<std::optional<BlochVector>> complementary_bloch;
  std::vector<std::size_t> active_set;
  Povm povm;
  ComplexMatrix symmetry_operator;  // (t I + b.sigma) / 2
  OptimalityCertificate certificate;
  bool trivial_guess = false;  // one state dominates: M = I on it
  bool fallback_used = false;  // reconstruction failed, fixed-point used
};

// One ball per state. Throws WrongDimension for non-qubit ensembles.
std::vector<WeightedBlochBall> dual_reduction(const Ensemble& ensemble);
std::vector<WeightedBlochBall> dual_reduction(
    const std::vector<double>& priors, const std::vector<BlochVector>& bloch);

// Smallest (b, t) with |b - c_i| <= t - q_i for every ball. Exact and
// deterministic; ties between optimal centers go to the lexicographically
// smallest b. Throws InvalidArgument for an empty list.
EnclosingBall min_enclosing_ball_of_balls(
    const std::vector<WeightedBlochBall>& balls,
    double tol = kGeometricTolerance);

// True when some b satisfies every constraint at radius t (checked exactly
// through the enumeration solver on the shifted problem).
bool enclosing_radius_feasible(const std::vector<WeightedBlochBall>& balls,
                               double t, double tol = kGeometricTolerance);

// M_i = alpha_i (I - w_i.sigma)/2 on the active indices with alpha >= 0,
// sum alpha = 2, sum alpha w = 0 (nonnegative least squares); zero elsewhere.
// Throws ReconstructionFailed.
Povm reconstruct_povm(const std::vector<BlochVector>& active_w,
                      const std::vector<std::size_t>& active_indices,
                      std::size_t n, double tol = 1e-8);

struct QubitOptions {
  double cert_tol = kDefaultCertTolerance;
  double geo_tol = kGeometricTolerance;
};

// Exact solve; falls back to the fixed-point solver (and says so) if the
// reconstructed measurement does not certify.
QubitSolution solve_qubit(const Ensemble& ensemble,
                          const QubitOptions& options = {});

}  // namespace qsd
