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

// Quantities built on top of the discrimination solvers: dimension
// witnesses, min-entropy, steering and the no-signaling bound, state
// exclusion (including the product ensembles used in the PBR argument),
// unitary discrimination, and mutual information.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsd/minerror.hpp"
#include "qsd/operator_core.hpp"

namespace qsd {

// ---------------------------------------------------------------------------
// Dimension witness

// Entry (x, y) holds p(k = 1 | prepared x, measurement of the pair {x, y}).
// States are labelled 1..N.
using WitnessTable = std::map<std::pair<int, int>, double>;

// sum_{x > x'} |p(1 | x, {x,x'}) - p(1 | x', {x,x'})|^2. Throws MissingPairs
// or OutOfRange.
double witness_value(const WitnessTable& table, int n);
// (N^2/2)(1 - 1/min(d, N)). Throws InvalidArgument for N < 2 or d < 1.
double witness_bound(int n, int d);

struct WitnessReport {
  double value = 0.0;
  int n = 0;
  std::map<int, double> bounds;  // d = 1..N
  int certified_min_dimension = 1;
};

WitnessReport witness_report(const WitnessTable& table, int n,
                             double cert_tol = kDefaultCertTolerance);

// Rows "x,x',p" after a header line. Throws ParseError.
WitnessTable read_witness_csv(std::istream& in);

// Table produced by measuring every pair with its equal-prior Helstrom
// measurement (outcome 1 <-> the first state of the pair).
WitnessTable simulate_witness_table(const std::vector<DensityMatrix>& states);

// ---------------------------------------------------------------------------
// Min-entropy

struct MinEntropyResult {
  double bits = 0.0;
  double p_guess = 0.0;
  std::string solver;  // "qubit-geometric" or "fixed-point"
  bool certified = false;
};

// -log2 p_guess of the optimal discrimination.
MinEntropyResult min_entropy(const Ensemble& ensemble);

// ---------------------------------------------------------------------------
// Steering and the no-signaling bound

struct SteeredPair {
  double p = 0.0;                     // probability of Alice's outcome M_i
  std::optional<ComplexMatrix> rho;   // Bob's state for outcome M_i
  std::optional<ComplexMatrix> sigma; // Bob's state for outcome I - M_i
};

struct SteeringScenario {
  DensityMatrix shared_state;
  Index dim_a = 0;
  Index dim_b = 0;
  std::vector<ComplexMatrix> alice_elements;  // M_i of {M_i, I - M_i}
  std::vector<SteeredPair> pairs;
  ComplexMatrix bob_marginal;
  double consistency_residual = 0.0;  // max_i ||p rho + (1-p) sigma - rho_B||
};

// Throws IncompleteMeasurement unless 0 <= M_i <= I, DimensionMismatch, or
// InvalidArgument when the shared state is not pure.
SteeringScenario steering_build(const DensityMatrix& shared_state,
                                Index dim_a, Index dim_b,
                                const std::vector<ComplexMatrix>& alice);

struct NoSignalingReport {
  double p_guess = 0.0;               // primal value of the optimal POVM
  std::vector<double> p;              // p_i = q_i / tr K
  double sum_p = 0.0;
  double product = 0.0;               // p_guess * sum_i p_i
  // Largest violation of "sigma_i is a state" in K/trK = p_i rho_i +
  // (1 - p_i) sigma_i, i.e. max_i of the most negative eigenvalue of
  // K - q_i rho_i.
  double decomposition_residual = 0.0;
  std::string solver;
  bool passed = false;
};

NoSignalingReport nosignaling_saturation(
    const Ensemble& ensemble, double cert_tol = kDefaultCertTolerance);

// ---------------------------------------------------------------------------
// State exclusion

struct ExclusionOptions {
  int max_iter = 20000;
  double cert_tol = kDefaultCertTolerance;
  int starts = 4;           // projected-gradient fallback starts
  int pg_iterations = 3000;
  std::uint64_t seed = 1;
};

struct ExclusionResult {
  double value = 1.0;  // min sum_i q_i tr[M_i rho_i]
  Povm povm;
  ComplexMatrix dual_k;  // K <= q_i rho_i for every i
  double gap = 0.0;      // value - tr K
  bool converged = false;
  bool perfect = false;  // value <= 1e-6
  std::string method;    // "trivial", "exchange-fixed-point", "barrier-newton",
                         // "projected-gradient"
};

ExclusionResult exclusion_solve(const Ensemble& ensemble,
                                const ExclusionOptions& options = {});

// 2^n equiprobable products of |psi_k> = cos(t/2)|0> + (-1)^k sin(t/2)|1>;
// bit strings are ordered with the first factor most significant.
Ensemble pbr_ensemble(double theta, int n,
                      std::size_t cap = kDefaultDimensionCap);

// ---------------------------------------------------------------------------
// Unitary discrimination

struct UnitaryReport {
  double u = 0.0;          // max trace distance of the two output states
  double u_search = 0.0;   // best value found by the input search
  double p_guess = 0.5;    // (1 + u/2)/2
  bool perfect = false;
  bool certified = false;  // u is exact (hull value attained)
  bool ancilla = false;
  ComplexVector optimal_input;
  double hull_distance = 1.0;  // distance from 0 to the eigenvalue hull
};

// Throws NotUnitary or DimensionMismatch.
UnitaryReport unitary_distinguishability(const ComplexMatrix& u1,
                                         const ComplexMatrix& u2,
                                         bool use_ancilla,
                                         std::uint64_t seed = 1);

// Smallest n <= n_cap with 0 in the eigenvalue hull of (U1^dagger U2)^n.
// Throws NotFound.
int unitary_repetition_n(const ComplexMatrix& u1, const ComplexMatrix& u2,
                         int n_cap = 1000);

// ---------------------------------------------------------------------------
// Information measures (bits)

double mutual_information(const Ensemble& ensemble, const Povm& povm);
double holevo_chi(const Ensemble& ensemble);

}  // namespace qsd
