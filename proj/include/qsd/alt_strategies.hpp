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

// Strategies that admit an inconclusive outcome: unambiguous discrimination,
// maximum-confidence measurements, and minimum error at a fixed rate of
// inconclusive results.

#include <cstdint>
#include <string>
#include <vector>

#include "qsd/minerror.hpp"
#include "qsd/operator_core.hpp"

namespace qsd {

struct UsdFeasibility {
  bool feasible = false;
  bool pure = false;                // every state is pure
  std::vector<bool> identifiable;   // per state: support escapes the others'
  std::string reason;
};

// Pure states: linear independence. Mixed states: each state's support must
// not lie inside the span of the other states' supports.
UsdFeasibility usd_feasible(const Ensemble& ensemble);

struct UsdResult {
  Povm povm;  // N conclusive elements followed by the inconclusive one
  double success_probability = 0.0;
  double inconclusive_rate = 0.0;
  double max_cross_click = 0.0;  // max_{i != j} tr[M_i rho_j]
  std::vector<double> coefficients;
};

// Optimal unambiguous discrimination of two linearly independent pure
// states; equal priors give the inconclusive rate |<psi1|psi2>|. Throws
// Infeasible.
UsdResult usd_two_pure(const ComplexVector& psi1, const ComplexVector& psi2,
                       double q1 = 0.5, double q2 = 0.5);

// N linearly independent pure states: elements a_i |u_i><u_i| along the
// normalized reciprocal basis, weights maximized under I - sum M_i >= 0.
// Throws Infeasible or NoConvergence.
UsdResult usd_reciprocal(const Ensemble& ensemble);

struct MaxConfResult {
  std::vector<double> confidences;  // C_k = p(rho_k | M_k)
  Povm povm;                        // N elements plus the inconclusive one
  double inconclusive_weight = 0.0; // tr[rho M_{N+1}]
  std::vector<double> coefficients; // c_k
  std::vector<bool> degenerate;     // top eigenvalue of rho'_k was degenerate
};

MaxConfResult max_confidence(const Ensemble& ensemble);

// q_k tr[M_k rho_k] / tr[rho M_k]. Throws ZeroClickProbability or OutOfRange.
double confidence_of(const Ensemble& ensemble, const Povm& povm,
                     std::size_t k, double cert_tol = kDefaultCertTolerance);

struct FixedRateProblem {
  ComplexMatrix inconclusive_element;  // M_{N+1}
  ComplexMatrix conclusive_operator;   // Omega = I - M_{N+1}
  ComplexMatrix conclusive_sqrt;       // Omega^{1/2}
  double rate = 0.0;                   // Q = tr[rho M_{N+1}]
  Ensemble projected;                  // {q~_i, rho~_i}
};

// Throws InvalidOperator unless 0 <= M_inconclusive <= I and some
// conclusive probability remains.
FixedRateProblem fixed_rate_reduction(const Ensemble& ensemble,
                                      const ComplexMatrix& m_inconclusive);

// M_i = Omega^{1/2} M~_i Omega^{1/2}, followed by the inconclusive element.
Povm fixed_rate_lift(const FixedRateProblem& problem, const Povm& projected);

struct FixedRateSolution {
  double rate = 0.0;
  double error = 0.0;    // (1 - Q)(1 - p~_guess)
  double success = 0.0;  // (1 - Q) p~_guess
  Povm povm;
};

// Minimum error for a given inconclusive element.
FixedRateSolution solve_fixed_rate(const Ensemble& ensemble,
                                   const ComplexMatrix& m_inconclusive);

struct CurvePoint {
  double rate = 0.0;
  double error = 0.0;
  bool feasible = true;
  // "rank-one": best element of the rank-one inconclusive family found by
  // search (a lower bound on achievable performance only within that
  // family); "abstain-mixture": an earlier point mixed with always
  // abstaining, which was better; "min-error": the Q = 0 endpoint.
  std::string family;
};

struct CurveOptions {
  int starts = 200;
  int refine = 6;
  std::uint64_t seed = 1;
};

// Two states only; grid is sorted internally and the output follows it.
std::vector<CurvePoint> error_vs_inconclusive_curve(
    const Ensemble& ensemble, std::vector<double> q_grid,
    const CurveOptions& options = {});

// Top eigenvector of a pure state, or throws InvalidArgument.
ComplexVector pure_state_ket(const DensityMatrix& rho, double tol = 1e-9);
bool is_pure(const DensityMatrix& rho, double tol = 1e-9);

}  // namespace qsd
