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

// Minimum-error discrimination: the two-state closed form, closed forms for
// geometrically uniform and mirror-symmetric ensembles, the general
// fixed-point solver, and the KKT certificate that judges any candidate.

#include <optional>
#include <span>
#include <vector>

#include "qsd/operator_core.hpp"

namespace qsd {

inline constexpr double kDefaultCertTolerance = 1e-7;
inline constexpr int kDefaultMaxIterations = 10000;

struct OptimalityCertificate {
  // max_j of the most negative eigenvalue of K - q_j rho_j (reported >= 0).
  double dual_feasibility_gap = 0.0;
  // max_i |tr[(K - q_i rho_i) M_i]| = max_i r_i tr[sigma_i M_i].
  double complementarity_residual = 0.0;
  // max_ij ||M_i (q_i rho_i - q_j rho_j) M_j||.
  double pairwise_residual = 0.0;
  // tr K - sum_i q_i tr[M_i rho_i].
  double primal_dual_gap = 0.0;
  double tolerance = kDefaultCertTolerance;
  bool passed = false;
};

struct DiscriminationResult {
  double p_guess = 0.0;
  Povm povm;
  ComplexMatrix symmetry_operator;  // K
  std::vector<double> residuals;    // r_i = tr K - q_i
  // sigma_i = (K - q_i rho_i) / r_i where r_i exceeds the certificate
  // tolerance; absent otherwise.
  std::vector<std::optional<ComplexMatrix>> complementary_states;
  OptimalityCertificate certificate;
  // Iterative solvers only.
  bool converged = true;
  bool monotone = true;
  int iterations = 0;
};

// Certificate for a candidate POVM (zero elements allowed). Throws
// DimensionMismatch or WrongCount.
OptimalityCertificate check_optimality(const Ensemble& ensemble,
                                       const Povm& povm,
                                       double cert_tol = kDefaultCertTolerance);

// Full result (K, residuals, complementary states, certificate) for a
// candidate POVM; p_guess is the primal value sum_i q_i tr[M_i rho_i].
DiscriminationResult evaluate_candidate(const Ensemble& ensemble, Povm povm,
                                        double cert_tol = kDefaultCertTolerance);

// Two states: p = 1/2 + ||q1 rho1 - q2 rho2||_1 / 2 with the projective
// measurement onto the positive part of the difference. Throws WrongCount.
DiscriminationResult helstrom_two_state(
    const Ensemble& ensemble, double cert_tol = kDefaultCertTolerance);

struct FixedPointOptions {
  int max_iter = kDefaultMaxIterations;
  double cert_tol = kDefaultCertTolerance;
  std::optional<Povm> seed;
};

// Iterates M_i <- G^{-1/2} R_i M_i R_i G^{-1/2} (R_i = q_i rho_i,
// G = sum_j R_j M_j R_j) until the certificate passes. When max_iter is
// reached without a passing certificate the last iterate is returned with
// converged = false; use solve_fixed_point_or_throw to get NoConvergence.
DiscriminationResult solve_fixed_point(const Ensemble& ensemble,
                                       const FixedPointOptions& options = {});
DiscriminationResult solve_fixed_point_or_throw(
    const Ensemble& ensemble, const FixedPointOptions& options = {});

// Pretty-good measurement rho^{-1/2} q_j rho_j rho^{-1/2}, with the kernel
// projector of rho shared evenly among the elements so the result is complete.
Povm square_root_measurement(const Ensemble& ensemble);

// d equiprobable states |psi_a>^{(x)N}, |psi_a> = sum_n c_n e^{2 pi i n a/d}
// |n>. Throws BadCoefficients or DimensionCapExceeded.
Ensemble gu_ensemble(std::span<const double> coefficients, int d, int copies,
                     std::size_t cap = kDefaultDimensionCap);
// Closed-form optimum for gu_ensemble (principal square-root branch).
double gu_guessing_probability(std::span<const double> coefficients, int d,
                               int copies,
                               std::size_t cap = kDefaultDimensionCap);

// Three equatorial qubit states |psi_{1,2}> = cos t |+> +- sin t |-> with
// prior p each and |+> with prior 1 - 2p.
Ensemble mirror_symmetric_ensemble(double p, double theta);
// Closed-form optimum for mirror_symmetric_ensemble; p in [0, 1/2],
// theta in [0, pi/2]. Throws OutOfRange.
double mirror_symmetric_guess(double p, double theta);
// Threshold prior separating the two branches.
double mirror_symmetric_threshold(double theta);

// Classical guessing probability sum_y max_x p(x, y) of a joint table with
// rows x and columns y. Throws NotDistribution.
double classical_guess(const Eigen::MatrixXd& joint);
// Variational distance d(X|Y) = sum_y max_x p(x,y) - 1/N.
double classical_guess_distance(const Eigen::MatrixXd& joint);

struct GeneralForm {
  double uniform_term = 0.0;      // 1/N
  double average_residual = 0.0;  // R = (1/N) sum_i r_i
  std::vector<double> residuals;
  bool residuals_equal = false;   // all r_i equal within the tolerance
};

// Splits p_guess = 1/N + R. Throws CertificateFailed for uncertified input.
GeneralForm general_form_report(const DiscriminationResult& result,
                                std::size_t n);

}  // namespace qsd
