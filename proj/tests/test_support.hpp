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

// Shared generators and independent oracles for the test suites. Nothing
// here calls the spectral routines under test: eigenvalues come from a
// hand-written cyclic Jacobi solver on the real symmetric embedding.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/operator_core.hpp"

namespace qsd::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a = 0.0, double b = 1.0) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline double gaussian(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline ComplexMatrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  ComplexMatrix g(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) g(r, c) = Complex(gaussian(rng), gaussian(rng));
  }
  return g;
}

inline ComplexVector random_ket(Rng& rng, Index d) {
  ComplexVector v = gaussian_matrix(rng, d, 1).col(0);
  return v / v.norm();
}

// Random state of the given rank (Wishart-like).
inline DensityMatrix random_state(Rng& rng, Index d, Index rank) {
  const ComplexMatrix g = gaussian_matrix(rng, d, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::validate(0.5 * (rho + rho.adjoint()));
}

inline DensityMatrix random_state(Rng& rng, Index d) {
  return random_state(rng, d, d);
}

inline std::vector<double> random_priors(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = uniform(rng, 0.05, 1.0);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

inline Ensemble random_ensemble(Rng& rng, std::size_t n, Index d,
                                bool mixed = true) {
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < n; ++i) {
    const Index rank = mixed ? 1 + static_cast<Index>(rng() % d) : 1;
    states.push_back(random_state(rng, d, rank));
  }
  return Ensemble(random_priors(rng, n), std::move(states));
}

// Haar-like unitary: QR of a complex Gaussian matrix with the phases of R's
// diagonal divided out.
inline ComplexMatrix random_unitary(Rng& rng, Index d) {
  const ComplexMatrix g = gaussian_matrix(rng, d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const Complex ph = r(k, k) / std::abs(r(k, k));
    q.col(k) *= ph;
  }
  return q;
}

inline BlochVector random_bloch(Rng& rng, double max_radius = 1.0) {
  BlochVector v(gaussian(rng), gaussian(rng), gaussian(rng));
  v.normalize();
  return v * max_radius * std::cbrt(uniform(rng));
}

// ---------------------------------------------------------------------------
// Independent eigenvalue oracle

// Eigenvalues of a Hermitian matrix via cyclic Jacobi rotations on the real
// symmetric embedding [[Re, -Im], [Im, Re]], whose spectrum is that of H
// with every eigenvalue doubled. Returned in descending order.
inline std::vector<double> jacobi_eigenvalues(const ComplexMatrix& h) {
  const Index n = h.rows();
  const Index m = 2 * n;
  Eigen::MatrixXd a(m, m);
  a.topLeftCorner(n, n) = h.real();
  a.topRightCorner(n, n) = -h.imag();
  a.bottomLeftCorner(n, n) = h.imag();
  a.bottomRightCorner(n, n) = h.real();
  a = 0.5 * (a + a.transpose()).eval();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < m; ++p) {
      for (Index q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Index p = 0; p < m; ++p) {
      for (Index q = p + 1; q < m; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(m);
  for (Index k = 0; k < m; ++k) ev[k] = a(k, k);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  std::vector<double> out;
  for (Index k = 0; k < m; k += 2) out.push_back(0.5 * (ev[k] + ev[k + 1]));
  return out;
}

inline double oracle_min_eigenvalue(const ComplexMatrix& h) {
  return jacobi_eigenvalues(h).back();
}

inline double oracle_trace_norm(const ComplexMatrix& h) {
  double s = 0.0;
  for (double v : jacobi_eigenvalues(h)) s += std::abs(v);
  return s;
}

// 1/2 + ||q1 rho1 - q2 rho2||_1 / 2 with the oracle trace norm.
inline double oracle_helstrom(const Ensemble& e) {
  return 0.5 * (1.0 + oracle_trace_norm(e.weighted(0) - e.weighted(1)));
}

// Optimality proof for a claimed discrimination optimum: K - q_i rho_i
// must be PSD and tr K must equal the primal value. Returns the larger of
// the dual infeasibility and the gap.
inline double oracle_dual_violation(const Ensemble& e, const ComplexMatrix& k,
                                    double p_guess) {
  double worst = std::abs(k.trace().real() - p_guess);
  for (std::size_t i = 0; i < e.size(); ++i) {
    worst = std::max(worst, -oracle_min_eigenvalue(k - e.weighted(i)));
  }
  return worst;
}

inline double primal_value(const Ensemble& e, const Povm& povm) {
  double p = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    p += e.prior(i) * (povm.element(i) * e.state(i).matrix()).trace().real();
  }
  return p;
}

// Largest |entry| of sum M - I plus the most negative element eigenvalue.
inline double povm_violation(const Povm& povm) {
  const Index d = povm.dim();
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  double worst = 0.0;
  for (const auto& m : povm.elements()) {
    s += m;
    worst = std::max(worst, -oracle_min_eigenvalue(m));
  }
  return std::max(worst, (s - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff());
}

}  // namespace qsd::testing

// Asserts that `stmt` throws qsd::Error with the given code.
#define EXPECT_QSD_ERROR(stmt, expected_code)                               \
  do {                                                                      \
    bool qsd_thrown_ = false;                                               \
    try {                                                                   \
      stmt;                                                                 \
    } catch (const ::qsd::Error& qsd_e_) {                                  \
      qsd_thrown_ = true;                                                   \
      EXPECT_EQ(qsd_e_.code(), (expected_code))                             \
          << ::qsd::error_code_name(qsd_e_.code()) << ": " << qsd_e_.what(); \
    }                                                                       \
    EXPECT_TRUE(qsd_thrown_) << "expected " << ::qsd::error_code_name(      \
                                                  expected_code);           \
  } while (0)
