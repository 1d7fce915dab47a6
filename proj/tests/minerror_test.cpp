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


#include "qsd/minerror.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qsd/catalog.hpp"
#include "test_support.hpp"

namespace qsd {
namespace {

using testing::Rng;
constexpr double kPi = std::numbers::pi;

ComplexVector plus_ket() {
  ComplexVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

// Best projective qubit measurement found on an angular grid, followed by a
// local grid refinement around the best point; includes the trivial
// measurements {I, 0} and {0, I}.
double angular_grid_helstrom(const Ensemble& e) {
  const auto value = [&](double theta, double phi) {
    const BlochVector n(std::sin(theta) * std::cos(phi),
                        std::sin(theta) * std::sin(phi), std::cos(theta));
    const ComplexMatrix p = bloch_operator(1.0, n);
    return e.prior(0) * (p * e.state(0).matrix()).trace().real() +
           e.prior(1) * ((identity(2) - p) * e.state(1).matrix()).trace().real();
  };
  double best = std::max(e.prior(0), e.prior(1));
  double bt = 0.0, bp = 0.0, span_t = kPi, span_p = 2 * kPi;
  for (int level = 0; level < 6; ++level) {
    const int steps = 120;
    const double t0 = level == 0 ? 0.0 : bt - span_t / 2;
    const double p0 = level == 0 ? 0.0 : bp - span_p / 2;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps; ++j) {
        const double t = t0 + span_t * i / steps;
        const double p = p0 + span_p * j / steps;
        const double v = value(t, p);
        if (v > best) {
          best = v;
          bt = t;
          bp = p;
        }
      }
    }
    span_t /= 20.0;
    span_p /= 20.0;
  }
  return best;
}

Ensemble zero_plus(double q1 = 0.5) {
  return Ensemble({q1, 1.0 - q1}, {DensityMatrix::from_ket(basis_ket(2, 0)),
                                   DensityMatrix::from_ket(plus_ket())});
}

TEST(HelstromTest, OrthogonalAndIdenticalStates) {
  const Ensemble ortho({DensityMatrix::from_ket(basis_ket(2, 0)),
                        DensityMatrix::from_ket(basis_ket(2, 1))});
  EXPECT_NEAR(helstrom_two_state(ortho).p_guess, 1.0, 1e-15);
  Rng rng(1);
  const DensityMatrix rho = testing::random_state(rng, 3);
  const DiscriminationResult same = helstrom_two_state(Ensemble({rho, rho}));
  EXPECT_NEAR(same.p_guess, 0.5, 1e-15);
  EXPECT_TRUE(same.certificate.passed);
}

TEST(HelstromTest, ZeroPlusMatchesAngularGridOracle) {
  const Ensemble e = zero_plus();
  const DiscriminationResult r = helstrom_two_state(e);
  EXPECT_NEAR(r.p_guess, 0.5 + std::sqrt(2.0) / 4.0, 1e-14);
  EXPECT_NEAR(r.p_guess, angular_grid_helstrom(e), 1e-8);
  EXPECT_TRUE(r.certificate.passed);
  EXPECT_LT(testing::povm_violation(r.povm), 1e-12);
}

TEST(HelstromTest, RandomMixedPairsMatchTraceNormOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Ensemble e = testing::random_ensemble(rng, 2, 2 + trial % 3);
    const DiscriminationResult r = helstrom_two_state(e);
    EXPECT_NEAR(r.p_guess, testing::oracle_helstrom(e), 1e-10);
    EXPECT_NEAR(testing::primal_value(e, r.povm), r.p_guess, 1e-10);
    EXPECT_TRUE(r.certificate.passed);
    if (e.dim() == 2) EXPECT_NEAR(r.p_guess, angular_grid_helstrom(e), 1e-7);
  }
}

TEST(HelstromTest, RejectsWrongCount) {
  EXPECT_QSD_ERROR(helstrom_two_state(trine_ensemble(kPi / 4)),
                   ErrorCode::kWrongCount);
}

TEST(CertificateTest, AcceptsOptimaRejectsTrivialMeasurement) {
  const Ensemble e = zero_plus();
  EXPECT_TRUE(check_optimality(e, helstrom_two_state(e).povm).passed);
  const Povm trivial =
      Povm::assume_valid({identity(2), ComplexMatrix::Zero(2, 2)});
  const OptimalityCertificate c = check_optimality(e, trivial);
  EXPECT_FALSE(c.passed);
  EXPECT_GT(c.dual_feasibility_gap, 1e-3);
  EXPECT_TRUE(check_optimality(trine_ensemble(kPi / 4), trine_measurement()).passed);
}

TEST(CertificateTest, RejectsMismatchedInputs) {
  const Ensemble e = zero_plus();
  EXPECT_QSD_ERROR(check_optimality(e, trine_measurement()),
                   ErrorCode::kWrongCount);
  const Povm big = Povm::assume_valid({identity(3), ComplexMatrix::Zero(3, 3)});
  EXPECT_QSD_ERROR(check_optimality(e, big), ErrorCode::kDimensionMismatch);
}

TEST(FixedPointTest, MatchesHelstromOnTwoStates) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Ensemble e = testing::random_ensemble(rng, 2, 2 + trial % 3);
    const DiscriminationResult fp = solve_fixed_point(e);
    EXPECT_TRUE(fp.converged);
    EXPECT_NEAR(fp.p_guess, helstrom_two_state(e).p_guess, 1e-7);
  }
}

TEST(FixedPointTest, TrineAndMirrorValues) {
  const DiscriminationResult trine = solve_fixed_point(trine_ensemble(kPi / 4));
  EXPECT_NEAR(trine.p_guess, 2.0 / 3.0, 1e-9);
  const DiscriminationResult mirror =
      solve_fixed_point(mirror_symmetric_ensemble(0.4, kPi / 4));
  EXPECT_NEAR(mirror.p_guess, 0.8, 1e-7);
}

TEST(FixedPointTest, CertifiedResultsProveOptimalityIndependently) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Ensemble e = testing::random_ensemble(rng, 3 + trial % 3, 3);
    const DiscriminationResult r = solve_fixed_point(e);
    ASSERT_TRUE(r.certificate.passed);
    EXPECT_LT(testing::oracle_dual_violation(e, r.symmetry_operator, r.p_guess),
              1e-7);
    EXPECT_LT(testing::povm_violation(r.povm), 1e-9);
    EXPECT_TRUE(r.monotone);
    double max_prior = 0.0;
    for (double q : e.priors()) max_prior = std::max(max_prior, q);
    EXPECT_GE(r.p_guess, max_prior - 1e-12);
    for (std::size_t i = 0; i < e.size(); ++i) {
      EXPECT_GE(r.residuals[i], -1e-9);
      if (r.complementary_states[i]) {
        const ComplexMatrix& sigma = *r.complementary_states[i];
        EXPECT_NEAR(sigma.trace().real(), 1.0, 1e-9);
        // K = q_i rho_i + r_i sigma_i.
        EXPECT_LT((e.weighted(i) + r.residuals[i] * sigma - r.symmetry_operator)
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-7);
      }
    }
  }
}

TEST(FixedPointTest, ReportsNonConvergenceWithPartialResult) {
  Rng rng(5);
  const Ensemble e = testing::random_ensemble(rng, 4, 3);
  FixedPointOptions o;
  o.max_iter = 1;
  o.cert_tol = 1e-14;
  const DiscriminationResult r = solve_fixed_point(e, o);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.certificate.passed);
  EXPECT_GT(r.p_guess, 0.0);
  EXPECT_QSD_ERROR(solve_fixed_point_or_throw(e, o), ErrorCode::kNoConvergence);
}

TEST(SquareRootMeasurementTest, OrthogonalBasisGivesProjectors) {
  std::vector<DensityMatrix> states;
  for (Index k = 0; k < 3; ++k) states.push_back(DensityMatrix::from_ket(basis_ket(3, k)));
  const Povm srm = square_root_measurement(Ensemble(states));
  for (Index k = 0; k < 3; ++k) {
    EXPECT_LT((srm.element(k) - projector(basis_ket(3, k))).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(SquareRootMeasurementTest, TrineGivesTrineMeasurement) {
  const Povm srm = square_root_measurement(trine_ensemble(kPi / 4));
  const Povm ref = trine_measurement();
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT((srm.element(k) - ref.element(k)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SquareRootMeasurementTest, SymmetricPurePairAttainsHelstrom) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Ensemble e({DensityMatrix::from_ket(testing::random_ket(rng, 3)),
                      DensityMatrix::from_ket(testing::random_ket(rng, 3))});
    EXPECT_NEAR(testing::primal_value(e, square_root_measurement(e)),
                helstrom_two_state(e).p_guess, 1e-10);
  }
}

TEST(SquareRootMeasurementTest, SingularAverageStaysComplete) {
  const Ensemble e({DensityMatrix::from_ket(basis_ket(3, 0)),
                    DensityMatrix::from_ket(basis_ket(3, 1))});
  EXPECT_LT(testing::povm_violation(square_root_measurement(e)), 1e-12);
}

TEST(GeometricallyUniformTest, EnsembleExamples) {
  const std::vector<double> trivial = {1.0, 0.0, 0.0};
  const Ensemble same = gu_ensemble(trivial, 3, 1);
  EXPECT_LT((same.state(0).matrix() - same.state(2).matrix()).norm(), 1e-15);

  const std::vector<double> fourier(4, 0.5);
  const Ensemble f = gu_ensemble(fourier, 4, 1);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      EXPECT_NEAR((f.state(a).matrix() * f.state(b).matrix()).trace().real(), 0.0,
                  1e-14);
    }
  }
  EXPECT_NEAR(gu_guessing_probability(fourier, 4, 1), 1.0, 1e-12);

  const double beta = 0.3;
  const std::vector<double> c = {std::cos(beta), std::sin(beta)};
  const Ensemble two = gu_ensemble(c, 2, 1);
  const double overlap =
      std::sqrt((two.state(0).matrix() * two.state(1).matrix()).trace().real());
  EXPECT_NEAR(overlap, std::cos(2 * beta), 1e-14);
  EXPECT_NEAR(gu_guessing_probability(c, 2, 1), (1 + std::sin(2 * beta)) / 2,
              1e-14);
  EXPECT_NEAR(gu_guessing_probability(c, 2, 1),
              0.5 + 0.5 * std::sqrt(1 - std::pow(std::cos(2 * beta), 2)), 1e-14);
}

TEST(GeometricallyUniformTest, SymmetryMapsStatesCyclically) {
  const std::vector<double> c = {0.6, 0.48, 0.64};
  const int d = 3, copies = 2;
  const Ensemble e = gu_ensemble(c, d, copies);
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) u(n, n) = std::polar(1.0, 2 * kPi * n / d);
  const ComplexMatrix uu = kron(u, u);
  for (int a = 0; a < d; ++a) {
    const ComplexMatrix moved = uu * e.state(a).matrix() * uu.adjoint();
    EXPECT_LT((moved - e.state((a + 1) % d).matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(GeometricallyUniformTest, FormulaMatchesSolversAndSrm) {
  Rng rng(7);
  for (int d = 2; d <= 4; ++d) {
    for (int copies = 1; copies <= 2; ++copies) {
      std::vector<double> c(d);
      double norm = 0.0;
      for (auto& x : c) {
        x = testing::uniform(rng, 0.1, 1.0);
        norm += x * x;
      }
      for (auto& x : c) x /= std::sqrt(norm);
      const Ensemble e = gu_ensemble(c, d, copies);
      const double formula = gu_guessing_probability(c, d, copies);
      EXPECT_NEAR(formula, solve_fixed_point(e).p_guess, 1e-6);
      EXPECT_NEAR(formula, testing::primal_value(e, square_root_measurement(e)),
                  1e-8);
    }
  }
}

TEST(GeometricallyUniformTest, RejectsBadInputs) {
  const std::vector<double> bad = {0.5, 0.5};
  EXPECT_QSD_ERROR(gu_ensemble(bad, 2, 1), ErrorCode::kBadCoefficients);
  const std::vector<double> neg = {0.6, -0.8};
  EXPECT_QSD_ERROR(gu_ensemble(neg, 2, 1), ErrorCode::kBadCoefficients);
  const std::vector<double> ok = {0.6, 0.8};
  EXPECT_QSD_ERROR(gu_ensemble(ok, 2, 13), ErrorCode::kDimensionCapExceeded);
}

TEST(MirrorSymmetricTest, Examples) {
  EXPECT_NEAR(mirror_symmetric_guess(0.4, kPi / 4), 0.8, 1e-12);
  EXPECT_NEAR(mirror_symmetric_guess(0.0, 0.7), 1.0, 1e-12);
  EXPECT_NEAR(mirror_symmetric_threshold(kPi / 4), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(mirror_symmetric_guess(1.0 / 3.0, kPi / 4), 2.0 / 3.0, 1e-12);
  EXPECT_QSD_ERROR(mirror_symmetric_guess(0.6, 0.3), ErrorCode::kOutOfRange);
  EXPECT_QSD_ERROR(mirror_symmetric_guess(0.2, 2.0), ErrorCode::kOutOfRange);
}

TEST(MirrorSymmetricTest, ContinuousAtThresholdAndMatchesSolver) {
  for (double theta : {0.2, 0.6, 1.0, 1.4}) {
    const double ps = mirror_symmetric_threshold(theta);
    EXPECT_NEAR(mirror_symmetric_guess(ps - 1e-12, theta),
                mirror_symmetric_guess(ps + 1e-12, theta), 1e-9);
    for (double p : {0.5 * ps, ps, std::min(0.5, 1.3 * ps)}) {
      EXPECT_NEAR(mirror_symmetric_guess(p, theta),
                  solve_fixed_point(mirror_symmetric_ensemble(p, theta)).p_guess,
                  1e-6)
          << "p=" << p << " theta=" << theta;
    }
  }
}

// Exhaustive search over all guessing functions g: Y -> X.
double brute_force_classical_guess(const Eigen::MatrixXd& joint) {
  const Index nx = joint.rows(), ny = joint.cols();
  Index total = 1;
  for (Index y = 0; y < ny; ++y) total *= nx;
  double best = 0.0;
  for (Index code = 0; code < total; ++code) {
    Index c = code;
    double v = 0.0;
    for (Index y = 0; y < ny; ++y) {
      v += joint(c % nx, y);
      c /= nx;
    }
    best = std::max(best, v);
  }
  return best;
}

TEST(ClassicalGuessTest, Examples) {
  Eigen::MatrixXd diag = Eigen::MatrixXd::Identity(3, 3) / 3.0;
  EXPECT_NEAR(classical_guess(diag), 1.0, 1e-15);
  Eigen::MatrixXd indep = Eigen::MatrixXd::Constant(4, 2, 1.0 / 8.0);
  EXPECT_NEAR(classical_guess(indep), 0.25, 1e-15);
  EXPECT_NEAR(classical_guess_distance(indep), 0.0, 1e-15);
  Eigen::MatrixXd channel(2, 2);
  channel << 0.6 * 0.9, 0.6 * 0.1, 0.4 * 0.3, 0.4 * 0.7;
  EXPECT_NEAR(classical_guess(channel), brute_force_classical_guess(channel), 1e-15);
  EXPECT_NEAR(classical_guess(channel), 0.5 + classical_guess_distance(channel),
              1e-15);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(2, 2, 0.3);
  EXPECT_QSD_ERROR(classical_guess(bad), ErrorCode::kNotDistribution);
}

TEST(ClassicalGuessTest, RandomTablesMatchExhaustiveSearch) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd t(3, 4);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = testing::uniform(rng);
    t /= t.sum();
    EXPECT_NEAR(classical_guess(t), brute_force_classical_guess(t), 1e-14);
  }
}

TEST(GeneralFormTest, Examples) {
  const Ensemble ortho({DensityMatrix::from_ket(basis_ket(2, 0)),
                        DensityMatrix::from_ket(basis_ket(2, 1))});
  GeneralForm g = general_form_report(helstrom_two_state(ortho), 2);
  EXPECT_NEAR(g.average_residual, 0.5, 1e-12);
  EXPECT_NEAR(g.uniform_term + g.average_residual, 1.0, 1e-12);

  const DiscriminationResult trine = solve_fixed_point(trine_ensemble(kPi / 4));
  g = general_form_report(trine, 3);
  EXPECT_NEAR(g.average_residual, 1.0 / 3.0, 1e-7);
  EXPECT_TRUE(g.residuals_equal);

  const Ensemble e = zero_plus(0.7);
  const DiscriminationResult h = helstrom_two_state(e);
  g = general_form_report(h, 2);
  const double tr_k = h.symmetry_operator.trace().real();
  EXPECT_NEAR(g.residuals[0], tr_k - 0.7, 1e-9);
  EXPECT_NEAR(g.residuals[1], tr_k - 0.3, 1e-9);
  EXPECT_NEAR(g.uniform_term + g.average_residual, h.p_guess, 1e-9);
}

TEST(GeneralFormTest, RejectsUncertifiedResults) {
  const Ensemble e = zero_plus();
  const DiscriminationResult bad = evaluate_candidate(
      e, Povm::assume_valid({identity(2), ComplexMatrix::Zero(2, 2)}));
  EXPECT_QSD_ERROR(general_form_report(bad, 2), ErrorCode::kCertificateFailed);
}

}  // namespace
}  // namespace qsd
