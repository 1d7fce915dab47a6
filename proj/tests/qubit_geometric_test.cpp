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


#include "qsd/qubit_geometric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qsd/catalog.hpp"
#include "qsd/minerror.hpp"
#include "test_support.hpp"

namespace qsd {
namespace {

using testing::Rng;
constexpr double kPi = std::numbers::pi;

// Subgradient optimality of f(b) = max_i (|b - c_i| + q_i): zero must lie in
// the convex hull of the unit vectors (b - c_i)/|b - c_i| over the balls
// attaining the maximum. By Caratheodory it suffices to look at subsets of
// at most four vectors; for each subset the minimum-norm point of its affine
// hull is solved directly and kept when its barycentric weights are >= 0.
double subgradient_gap(const std::vector<WeightedBlochBall>& balls,
                       const EnclosingBall& ball) {
  std::vector<BlochVector> u;
  for (const auto& w : balls) {
    const BlochVector diff = ball.center - w.center;
    const double reach = diff.norm() + w.weight;
    if (reach < ball.radius - 1e-7) continue;
    if (diff.norm() < 1e-9) return 0.0;  // subdifferential is the unit ball
    u.push_back(diff / diff.norm());
  }
  if (u.empty()) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = u.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    if (idx.size() > 4) continue;
    const Index k = static_cast<Index>(idx.size());
    // min |sum l_j u_j|^2 s.t. sum l_j = 1: [G 1; 1^T 0][l; mu] = [0; 1].
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) a(r, c) = u[idx[r]].dot(u[idx[c]]);
      a(r, k) = a(k, r) = 1.0;
    }
    rhs(k) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (sol.head(k).minCoeff() < -1e-12) continue;
    BlochVector x = BlochVector::Zero();
    for (Index r = 0; r < k; ++r) x += sol(r) * u[idx[r]];
    best = std::min(best, x.norm());
  }
  return best;
}

std::vector<WeightedBlochBall> random_balls(Rng& rng, std::size_t n) {
  const std::vector<double> q = testing::random_priors(rng, n);
  std::vector<BlochVector> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(testing::random_bloch(rng));
  return dual_reduction(q, v);
}

TEST(DualReductionTest, Examples) {
  const Ensemble one({DensityMatrix::from_ket(basis_ket(2, 0))});
  auto balls = dual_reduction(one);
  ASSERT_EQ(balls.size(), 1u);
  EXPECT_NEAR(balls[0].weight, 1.0, 1e-15);
  EXPECT_LT((balls[0].center - BlochVector(0, 0, 1)).norm(), 1e-15);

  balls = dual_reduction(trine_ensemble(kPi / 4));
  ASSERT_EQ(balls.size(), 3u);
  for (const auto& b : balls) {
    EXPECT_NEAR(b.weight, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(b.center.norm(), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(b.center.z(), 0.0, 1e-14);
  }
  EXPECT_QSD_ERROR(dual_reduction(Ensemble({DensityMatrix::from_ket(basis_ket(3, 0))})),
                   ErrorCode::kWrongDimension);
}

TEST(EnclosingBallTest, SingleAndTwoBalls) {
  const EnclosingBall one =
      min_enclosing_ball_of_balls({{BlochVector(0.1, 0.2, 0.3), 1.0}});
  EXPECT_NEAR(one.radius, 1.0, 1e-15);
  EXPECT_LT((one.center - BlochVector(0.1, 0.2, 0.3)).norm(), 1e-15);

  const EnclosingBall two = min_enclosing_ball_of_balls(
      {{BlochVector(0, 0, 0.5), 0.5}, {BlochVector(0.5, 0, 0), 0.5}});
  EXPECT_NEAR(two.radius, (1 + std::sqrt(2.0) / 2) / 2, 1e-12);
  EXPECT_NEAR(two.radius, 0.5 + std::sqrt(2.0) / 4, 1e-12);
}

TEST(EnclosingBallTest, NestedBallGivesTrivialGuess) {
  // q1 rho1 >= q2 rho2: 0.8 I/2 dominates 0.2|0><0|.
  const Ensemble e({0.8, 0.2}, {DensityMatrix::assume_valid(identity(2) / 2.0),
                                DensityMatrix::from_ket(basis_ket(2, 0))});
  const QubitSolution s = solve_qubit(e);
  EXPECT_NEAR(s.p_guess, 0.8, 1e-12);
  EXPECT_TRUE(s.certificate.passed);
  EXPECT_LT(s.povm.element(1).norm(), 1e-9);
}

TEST(EnclosingBallTest, SubgradientMinimalityOnRandomBalls) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto balls = random_balls(rng, 2 + trial % 6);
    const EnclosingBall b = min_enclosing_ball_of_balls(balls);
    for (const auto& w : balls) {
      EXPECT_LE((b.center - w.center).norm() + w.weight, b.radius + 1e-9);
    }
    EXPECT_LT(subgradient_gap(balls, b), 1e-6) << "trial " << trial;
    EXPECT_FALSE(enclosing_radius_feasible(balls, b.radius - 1e-6));
    EXPECT_TRUE(enclosing_radius_feasible(balls, b.radius + 1e-9));
  }
}

TEST(EnclosingBallTest, DeterministicOutput) {
  Rng rng(22);
  const auto balls = random_balls(rng, 5);
  const EnclosingBall a = min_enclosing_ball_of_balls(balls);
  const EnclosingBall b = min_enclosing_ball_of_balls(balls);
  EXPECT_EQ(a.radius, b.radius);
  EXPECT_EQ(a.center, b.center);
  EXPECT_QSD_ERROR(min_enclosing_ball_of_balls({}), ErrorCode::kInvalidArgument);
}

TEST(SolveQubitTest, TrineAllActive) {
  const QubitSolution s = solve_qubit(trine_ensemble(kPi / 4));
  EXPECT_NEAR(s.p_guess, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(s.active_set.size(), 3u);
  EXPECT_TRUE(s.certificate.passed);
  EXPECT_FALSE(s.fallback_used);
  const Povm ref = trine_measurement();
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT((s.povm.element(k) - ref.element(k)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SolveQubitTest, IsoscelesRegimes) {
  const double theta0 = 0.7;
  for (double theta : {0.2, 0.6, 1.0, 1.5}) {
    const QubitSolution s = solve_qubit(isosceles_ensemble(theta0, theta));
    EXPECT_NEAR(s.p_guess, (1 + std::sin(theta)) / 3, 1e-10);
    EXPECT_LT(s.povm.element(1).norm(), 1e-7) << "middle state must be inactive";
    EXPECT_EQ(s.active_set.size(), 2u);
    EXPECT_TRUE(s.certificate.passed);
  }
  for (double theta : {1.8, 2.2, 2.8}) {
    EXPECT_NEAR(solve_qubit(isosceles_ensemble(theta0, theta)).p_guess, 2.0 / 3.0,
                1e-10);
  }
}

TEST(SolveQubitTest, EquatorialStatesGiveTwoOverN) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const Ensemble e = equatorial_ensemble(n);
    const QubitSolution s = solve_qubit(e);
    EXPECT_NEAR(s.p_guess, 2.0 / n, 1e-10) << n;
    EXPECT_NEAR(solve_fixed_point(e).p_guess, 2.0 / n, 1e-7);
  }
}

TEST(SolveQubitTest, EqualPriorsGiveEqualOffsets) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DensityMatrix> states;
    for (int i = 0; i < 4; ++i) states.push_back(testing::random_state(rng, 2));
    const Ensemble e(states);
    const QubitSolution s = solve_qubit(e);
    for (std::size_t i = 0; i < e.size(); ++i) {
      // t - q_i = r_i is the same for every state.
      EXPECT_NEAR(s.ball.radius - e.prior(i), s.ball.radius - e.prior(0), 1e-12);
      if (s.complementary_bloch[i]) {
        EXPECT_LE(s.complementary_bloch[i]->norm(), 1 + 1e-7);
      }
    }
  }
}

TEST(SolveQubitTest, TwoStatesEqualHelstrom) {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const Ensemble e = testing::random_ensemble(rng, 2, 2);
    EXPECT_NEAR(solve_qubit(e).p_guess, testing::oracle_helstrom(e), 1e-9);
  }
}

TEST(SolveQubitTest, IdenticalStatesGiveLargestPrior) {
  const DensityMatrix rho = from_bloch(BlochVector(0.2, 0.1, -0.4));
  const Ensemble e({0.2, 0.5, 0.3}, {rho, rho, rho});
  const QubitSolution s = solve_qubit(e);
  EXPECT_NEAR(s.p_guess, 0.5, 1e-12);
  EXPECT_TRUE(s.certificate.passed);
  EXPECT_LT((s.povm.element(1) - identity(2)).norm(), 1e-9);
}

TEST(ReconstructTest, AntipodalAndTrine) {
  const Povm axis = reconstruct_povm({BlochVector(0, 0, 1), BlochVector(0, 0, -1)},
                                     {0, 1}, 2);
  EXPECT_LT((axis.element(0) - projector(basis_ket(2, 1))).norm(), 1e-12);
  EXPECT_LT((axis.element(1) - projector(basis_ket(2, 0))).norm(), 1e-12);

  std::vector<BlochVector> w;
  for (double phi : {2 * kPi / 3, 0.0, -2 * kPi / 3}) {
    w.push_back(-BlochVector(std::cos(phi), std::sin(phi), 0.0));
  }
  const Povm trine = reconstruct_povm(w, {0, 1, 2}, 3);
  const Povm ref = trine_measurement();
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(trine.element(k).trace().real(), 2.0 / 3.0, 1e-12);
    EXPECT_LT((trine.element(k) - ref.element(k)).norm(), 1e-12);
  }
}

TEST(ReconstructTest, FailsWithoutNonnegativeSolution) {
  EXPECT_QSD_ERROR(reconstruct_povm({BlochVector(0, 0, 1), BlochVector(1, 0, 0)},
                                    {0, 1}, 2),
                   ErrorCode::kReconstructionFailed);
}

TEST(ReconstructTest, InactiveIndicesCarryZero) {
  const Povm p = reconstruct_povm({BlochVector(0, 0, 1), BlochVector(0, 0, -1)},
                                  {0, 2}, 3);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_LT(p.element(1).norm(), 1e-15);
}

}  // namespace
}  // namespace qsd
