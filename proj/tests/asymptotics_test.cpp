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


#include "qsd/asymptotics.hpp"

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

ComplexVector ket2(Complex a, Complex b) {
  ComplexVector v(2);
  v << a, b;
  return v;
}

DensityMatrix diag_state(const std::vector<double>& p) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(p.size()),
                                        static_cast<Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = p[i];
  return DensityMatrix::validate(m);
}

// Classical Chernoff information by exhaustive scan over a fine s grid.
double scan_classical_chernoff(const std::vector<double>& p, const std::vector<double>& q) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 100000; ++k) {
    const double s = k / 100000.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0 && q[i] > 0) sum += std::pow(p[i], s) * std::pow(q[i], 1 - s);
      else if (s == 0.0 && q[i] > 0 && p[i] == 0) sum += 0.0;
    }
    best = std::min(best, sum);
  }
  return -std::log(best);
}

std::vector<double> random_distribution(Rng& rng, int n) {
  std::vector<double> p(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : p) total += (x = testing::uniform(rng, 0.05, 1.0));
  for (auto& x : p) x /= total;
  return p;
}

TEST(ChernoffTest, IdenticalStatesGiveZero) {
  Rng rng(41);
  const DensityMatrix r = testing::random_state(rng, 3);
  EXPECT_NEAR(chernoff_two(r, r).xi, 0.0, 1e-12);
}

TEST(ChernoffTest, PurePairIsMinusLogOverlap) {
  const DensityMatrix z = DensityMatrix::from_ket(basis_ket(2, 0));
  const DensityMatrix p = DensityMatrix::from_ket(ket2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)));
  const ChernoffResult r = chernoff_two(z, p);
  EXPECT_NEAR(r.xi, std::log(2.0), 1e-14);
  for (const auto& [s, v] : r.trace_curve) EXPECT_NEAR(v, 0.5, 1e-12) << s;

  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector a = testing::random_ket(rng, 3);
    const ComplexVector b = testing::random_ket(rng, 3);
    const double overlap = std::norm(a.dot(b));
    EXPECT_NEAR(chernoff_two(DensityMatrix::from_ket(a), DensityMatrix::from_ket(b)).xi,
                -std::log(overlap), 1e-9);
  }
}

TEST(ChernoffTest, CommutingPairMatchesClassicalScan) {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_distribution(rng, 3);
    const auto q = random_distribution(rng, 3);
    const double oracle = scan_classical_chernoff(p, q);
    EXPECT_NEAR(chernoff_two(diag_state(p), diag_state(q)).xi, oracle, 1e-9);
    EXPECT_NEAR(chernoff_classical(p, q).xi, oracle, 1e-9);
  }
}

TEST(ChernoffTest, ClassicalExamples) {
  const std::vector<double> a = {1.0, 0.0}, b = {0.5, 0.5}, c = {0.0, 1.0};
  EXPECT_NEAR(chernoff_classical(a, a).xi, 0.0, 1e-14);
  const ChernoffResult r = chernoff_classical(a, b);
  EXPECT_NEAR(r.xi, std::log(2.0), 1e-10);
  EXPECT_NEAR(r.s_star, 0.0, 1e-8);
  const ChernoffResult d = chernoff_classical(a, c);
  EXPECT_TRUE(d.disjoint_supports);
  EXPECT_TRUE(std::isinf(d.xi));
  const std::vector<double> bad = {0.7, 0.7};
  EXPECT_QSD_ERROR(chernoff_classical(a, bad), ErrorCode::kNotDistribution);
}

TEST(ChernoffTest, DisjointQuantumSupports) {
  const ChernoffResult r = chernoff_two(DensityMatrix::from_ket(basis_ket(2, 0)),
                                        DensityMatrix::from_ket(basis_ket(2, 1)));
  EXPECT_TRUE(r.disjoint_supports);
  EXPECT_TRUE(std::isinf(r.xi));
}

TEST(ChernoffTest, SymmetricUnitarilyInvariantAndGridBracketed) {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 3;
    const DensityMatrix a = testing::random_state(rng, d);
    const DensityMatrix b = testing::random_state(rng, d, 1 + trial % d);
    const ChernoffResult ab = chernoff_two(a, b);
    EXPECT_NEAR(ab.xi, chernoff_two(b, a).xi, 1e-10);
    const ComplexMatrix u = testing::random_unitary(rng, d);
    const DensityMatrix ua = DensityMatrix::validate(u * a.matrix() * u.adjoint());
    const DensityMatrix ub = DensityMatrix::validate(u * b.matrix() * u.adjoint());
    EXPECT_NEAR(chernoff_two(ua, ub).xi, ab.xi, 1e-9);
    EXPECT_FALSE(ab.grid_warning);
    for (const auto& [s, v] : ab.trace_curve) {
      EXPECT_GE(v, ab.minimum - 1e-9);
      EXPECT_LE(v, 1.0 + 1e-9);
    }
  }
}

TEST(ChernoffMultiTest, Examples) {
  const Ensemble trine = trine_ensemble(std::numbers::pi / 4);
  const MultiChernoff t = chernoff_multi(trine.states());
  const double pair = chernoff_two(trine.state(0), trine.state(1)).xi;
  EXPECT_NEAR(t.xi, pair, 1e-10);
  EXPECT_NEAR(chernoff_two(trine.state(1), trine.state(2)).xi, pair, 1e-9);

  Rng rng(45);
  const DensityMatrix r = testing::random_state(rng, 2);
  const std::vector<DensityMatrix> dup = {r, testing::random_state(rng, 2), r};
  EXPECT_NEAR(chernoff_multi(dup).xi, 0.0, 1e-12);

  const DensityMatrix z = DensityMatrix::from_ket(basis_ket(2, 0));
  const DensityMatrix o = DensityMatrix::from_ket(basis_ket(2, 1));
  const DensityMatrix p = DensityMatrix::from_ket(ket2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)));
  const std::vector<DensityMatrix> mixed_set = {z, o, p};
  EXPECT_NEAR(chernoff_multi(mixed_set).xi, std::log(2.0), 1e-10);

  const std::vector<DensityMatrix> one = {z};
  EXPECT_QSD_ERROR(chernoff_multi(one), ErrorCode::kWrongCount);
}

TEST(FiniteNTest, PurePairMatchesClosedForm) {
  Rng rng(46);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexVector a = testing::random_ket(rng, 2);
    const ComplexVector b = testing::random_ket(rng, 2);
    const double q1 = testing::uniform(rng, 0.2, 0.8);
    const ExponentEstimate est = finite_n_error(DensityMatrix::from_ket(a),
                                                DensityMatrix::from_ket(b), q1, 1 - q1, 6);
    const double s2 = std::norm(a.dot(b));
    for (std::size_t i = 0; i < est.n_values.size(); ++i) {
      const double closed =
          0.5 * (1 - std::sqrt(1 - 4 * q1 * (1 - q1) * std::pow(s2, est.n_values[i])));
      EXPECT_NEAR(est.error_probs[i], closed, 1e-10);
    }
  }
}

TEST(FiniteNTest, OrthogonalPairHasZeroError) {
  const ExponentEstimate est =
      finite_n_error(DensityMatrix::from_ket(basis_ket(2, 0)),
                     DensityMatrix::from_ket(basis_ket(2, 1)), 0.5, 0.5, 4);
  for (double p : est.error_probs) EXPECT_NEAR(p, 0.0, 1e-12);
}

TEST(FiniteNTest, ExponentApproachesChernoffForZeroPlus) {
  const DensityMatrix z = DensityMatrix::from_ket(basis_ket(2, 0));
  const DensityMatrix p = DensityMatrix::from_ket(ket2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)));
  const ExponentEstimate est = finite_n_error(z, p, 0.5, 0.5, 10);
  ASSERT_EQ(est.n_values.size(), 10U);
  EXPECT_NEAR(est.fitted_exponent, std::log(2.0), 0.15 * std::log(2.0));
  for (std::size_t i = 1; i < est.error_probs.size(); ++i) {
    EXPECT_LE(est.error_probs[i], est.error_probs[i - 1] + 1e-15);
  }
}

TEST(FiniteNTest, CommutingPairExponentMatchesClassical) {
  // Minimum of the classical curve at the endpoint s = 0: the n-copy error
  // is a pure exponential with no polynomial prefactor.
  const std::vector<double> p = {1.0, 0.0}, q = {0.5, 0.5};
  const ExponentEstimate est = finite_n_error(diag_state(p), diag_state(q), 0.5, 0.5, 10);
  const double xi = scan_classical_chernoff(p, q);
  EXPECT_NEAR(xi, std::log(2.0), 1e-12);
  EXPECT_NEAR(est.fitted_exponent, xi, 0.10 * xi);
}

TEST(FiniteNTest, CommutingInteriorMinimumApproachesFromAbove) {
  // With an interior minimiser the error carries an n^{-1/2} prefactor, so
  // the finite-n slope overshoots by roughly 1/(2n) and decreases toward xi.
  const std::vector<double> p = {0.8, 0.2}, q = {0.3, 0.7};
  const ExponentEstimate est = finite_n_error(diag_state(p), diag_state(q), 0.5, 0.5, 10);
  const double xi = scan_classical_chernoff(p, q);
  EXPECT_GT(est.fitted_exponent, xi);
  EXPECT_LT(est.fitted_exponent, xi + 1.0 / 10.0);
  const ExponentEstimate shorter = finite_n_error(diag_state(p), diag_state(q), 0.5, 0.5, 6);
  EXPECT_LE(est.fitted_exponent, shorter.fitted_exponent + 1e-3);
}

TEST(FiniteNTest, DimensionCap) {
  const DensityMatrix z = DensityMatrix::from_ket(basis_ket(2, 0));
  EXPECT_QSD_ERROR(finite_n_error(z, z, 0.5, 0.5, 13), ErrorCode::kDimensionCapExceeded);
  EXPECT_QSD_ERROR(finite_n_error(z, z, 0.5, 0.5, 5, 16), ErrorCode::kDimensionCapExceeded);
}

TEST(SandwichTest, TrineOrderingAndTwoStateUpperBound) {
  const Ensemble trine = trine_ensemble(std::numbers::pi / 4);
  const SandwichReport t = sandwich_check(trine.states(), 4);
  EXPECT_LE(t.lower, t.upper);
  EXPECT_NEAR(t.lower, t.upper / 3, 1e-15);
  EXPECT_GT(t.empirical, 0.0);

  const std::vector<DensityMatrix> two = {
      DensityMatrix::from_ket(basis_ket(2, 0)),
      DensityMatrix::from_ket(ket2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)))};
  const SandwichReport s = sandwich_check(two, 8);
  EXPECT_LE(s.empirical, s.upper * 1.15);
  EXPECT_GE(s.empirical, s.lower);
}

TEST(SandwichTest, CommutingTripleRespectsClassicalPairwiseBounds) {
  const std::vector<std::vector<double>> dists = {{0.95, 0.05}, {0.5, 0.5}, {0.05, 0.95}};
  std::vector<DensityMatrix> states;
  for (const auto& p : dists) states.push_back(diag_state(p));
  double pairwise = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      pairwise = std::min(pairwise, scan_classical_chernoff(dists[i], dists[j]));
    }
  }
  const SandwichReport r = sandwich_check(states, 6);
  EXPECT_NEAR(r.upper, pairwise, 1e-8);
  EXPECT_GE(r.empirical, r.lower);
  // Commuting states: the optimal n-copy error is classical MAP decoding on
  // the count of outcome 0.
  for (std::size_t i = 0; i < r.trend.n_values.size(); ++i) {
    const int n = r.trend.n_values[i];
    double correct = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double binom =
          std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
      double best = 0.0;
      for (const auto& d : dists) {
        best = std::max(best, binom * std::pow(d[0], k) * std::pow(d[1], n - k) / 3.0);
      }
      correct += best;
    }
    EXPECT_NEAR(r.trend.error_probs[i], 1 - correct, 1e-7) << n;
  }
}

// Exact error of majority-vote style decoding for a two-outcome POVM:
// enumerate the count of outcome 0 with binomial weights.
double binomial_map_error(double a0, double b0, double q1, double q2, int n) {
  double correct = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double binom = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
    const double pa = binom * std::pow(a0, k) * std::pow(1 - a0, n - k);
    const double pb = binom * std::pow(b0, k) * std::pow(1 - b0, n - k);
    correct += std::max(q1 * pa, q2 * pb);
  }
  return 1 - correct;
}

TEST(RepeatedMeasurementTest, Examples) {
  const Ensemble ortho({DensityMatrix::from_ket(basis_ket(2, 0)),
                        DensityMatrix::from_ket(basis_ket(2, 1))});
  const Povm z = Povm::assume_valid({projector(basis_ket(2, 0)), projector(basis_ket(2, 1))});
  EXPECT_NEAR(repeated_measurement_sim(ortho, z, 1), 0.0, 1e-15);

  const Povm blind = Povm::assume_valid({identity(2) / 2.0, identity(2) / 2.0});
  for (int n : {1, 3, 6}) EXPECT_NEAR(repeated_measurement_sim(ortho, blind, n), 0.5, 1e-12);

  const DensityMatrix zs = DensityMatrix::from_ket(basis_ket(2, 0));
  const DensityMatrix ps = DensityMatrix::from_ket(ket2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)));
  const Ensemble e({zs, ps});
  const Povm h = helstrom_two_state(e).povm;
  const double a0 = (zs.matrix() * h.element(0)).trace().real();
  const double b0 = (ps.matrix() * h.element(0)).trace().real();
  const ExponentEstimate collective = finite_n_error(zs, ps, 0.5, 0.5, 5);
  for (int n = 1; n <= 5; ++n) {
    const double rep = repeated_measurement_sim(e, h, n);
    EXPECT_NEAR(rep, binomial_map_error(a0, b0, 0.5, 0.5, n), 1e-12);
    EXPECT_GE(rep, collective.error_probs[static_cast<std::size_t>(n - 1)] - 1e-12);
  }
}

TEST(RepeatedMeasurementTest, NeverBeatsCollective) {
  Rng rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    const Ensemble e = testing::random_ensemble(rng, 2, 2);
    const Povm m = Povm::assume_valid([&] {
      const ComplexMatrix u = testing::random_unitary(rng, 2);
      return std::vector<ComplexMatrix>{projector(u.col(0)), projector(u.col(1))};
    }());
    const int n = 1 + trial % 4;
    const ExponentEstimate collective =
        finite_n_error(e.state(0), e.state(1), e.prior(0), e.prior(1), n);
    EXPECT_GE(repeated_measurement_sim(e, m, n), collective.error_probs.back() - 1e-12);
  }
}

}  // namespace
}  // namespace qsd
