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

#include "qsd/alt_strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qsd/optim.hpp"
#include "qsd/qubit_geometric.hpp"

namespace qsd {

namespace {

double max_cross_click(const Ensemble& ensemble, const Povm& povm) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
      if (i == j) continue;
      worst = std::max(
          worst, trace_product(povm.element(i), ensemble.state(j).matrix()));
    }
  }
  return worst;
}

UsdResult finish_usd(const Ensemble& ensemble,
                     std::vector<ComplexMatrix> conclusive,
                     std::vector<double> coefficients) {
  const Index d = ensemble.dim();
  ComplexMatrix rest = identity(d);
  for (const ComplexMatrix& m : conclusive) rest -= m;
  conclusive.push_back(hermitian_part(rest));
  UsdResult r;
  r.povm = Povm::assume_valid(std::move(conclusive));
  r.coefficients = std::move(coefficients);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    r.success_probability +=
        trace_product(ensemble.weighted(i), r.povm.element(i));
  }
  r.inconclusive_rate =
      trace_product(ensemble.average(), r.povm.element(ensemble.size()));
  r.max_cross_click = max_cross_click(ensemble, r.povm);
  return r;
}

// Largest delta with S - delta b b^dagger >= 0 for PSD S.
double max_rank_one_step(const ComplexMatrix& s, const ComplexVector& b) {
  const Eigensystem es = hermitian_eigensystem(hermitian_part(s));
  const double lmax = std::max(es.values(0), 0.0);
  const double cutoff = 1e-10 * std::max(1.0, lmax);
  const double bnorm2 = b.squaredNorm();
  double quad = 0.0;
  for (Index k = 0; k < es.values.size(); ++k) {
    const double c = std::norm(es.vectors.col(k).dot(b));
    if (es.values(k) <= cutoff) {
      if (c > 1e-18 * std::max(bnorm2, 1e-300)) return 0.0;
      continue;
    }
    quad += c / es.values(k);
  }
  return quad > 0.0 ? 1.0 / quad : 0.0;
}

}  // namespace

bool is_pure(const DensityMatrix& rho, double tol) {
  return max_eigenvalue(rho.matrix()) >= 1.0 - tol;
}

ComplexVector pure_state_ket(const DensityMatrix& rho, double tol) {
  const Eigensystem es = hermitian_eigensystem(rho.matrix());
  if (es.values(0) < 1.0 - tol) {
    throw Error(ErrorCode::kInvalidArgument, "state is not pure");
  }
  return es.vectors.col(0);
}

// ---------------------------------------------------------------------------

UsdFeasibility usd_feasible(const Ensemble& ensemble) {
  UsdFeasibility f;
  const std::size_t n = ensemble.size();
  const Index d = ensemble.dim();
  f.pure = true;
  for (const DensityMatrix& s : ensemble.states()) f.pure = f.pure && is_pure(s);
  f.feasible = true;
  for (std::size_t i = 0; i < n; ++i) {
    ComplexMatrix others = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others += ensemble.state(j).matrix();
    }
    const ComplexMatrix kernel = identity(d) - support_projector(others);
    const double escape = trace_product(kernel, ensemble.state(i).matrix());
    f.identifiable.push_back(escape > 1e-9);
    f.feasible = f.feasible && f.identifiable.back();
  }
  if (f.feasible) {
    f.reason = f.pure ? "pure states are linearly independent"
                      : "every support escapes the span of the others";
  } else {
    f.reason = f.pure ? "pure states are linearly dependent"
                      : "some support lies inside the span of the others";
  }
  return f;
}

UsdResult usd_two_pure(const ComplexVector& psi1, const ComplexVector& psi2,
                       double q1, double q2) {
  if (psi1.size() != psi2.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "kets differ in dimension");
  }
  const Ensemble ensemble({q1, q2}, {DensityMatrix::from_ket(psi1),
                                     DensityMatrix::from_ket(psi2)});
  const ComplexVector a = psi1.normalized();
  const ComplexVector b = psi2.normalized();
  const double s = std::abs(a.dot(b));
  if (s > 1.0 - 1e-12) {
    throw Error(ErrorCode::kInfeasible,
                "identical states cannot be discriminated unambiguously");
  }
  // Unit vectors in the span orthogonal to psi2 and psi1 respectively.
  const ComplexVector perp2 = (a - b.dot(a) * b).normalized();
  const ComplexVector perp1 = (b - a.dot(b) * a).normalized();
  const double s2 = s * s;
  if (s2 < 1e-24) {
    // Orthogonal kets: the two projectors already resolve the identity on
    // their span.
    return finish_usd(ensemble, {projector(perp2), projector(perp1)}, {1.0, 1.0});
  }
  // Boundary of I - a P2perp - b P1perp >= 0: b(a) = (1 - a)/(1 - a(1 - s^2)).
  auto partner = [&](double x) { return (1.0 - x) / (1.0 - x * (1.0 - s2)); };
  auto value = [&](double x) { return q1 * x + q2 * partner(x); };
  std::vector<double> candidates = {0.0, 1.0};
  if (q1 > 0.0 && s2 < 1.0) {
    const double stat = (1.0 - std::sqrt(q2 * s2 / q1)) / (1.0 - s2);
    if (stat > 0.0 && stat < 1.0) candidates.push_back(stat);
  }
  double best = candidates[0];
  for (double x : candidates) {
    if (value(x) > value(best) + 1e-15) best = x;
  }
  const double ca = best;
  const double cb = std::clamp(partner(best), 0.0, 1.0);
  return finish_usd(ensemble, {ca * projector(perp2), cb * projector(perp1)},
                    {ca, cb});
}

UsdResult usd_reciprocal(const Ensemble& ensemble) {
  const std::size_t n = ensemble.size();
  const Index d = ensemble.dim();
  ComplexMatrix psi(d, static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_pure(ensemble.state(i))) {
      throw Error(ErrorCode::kInfeasible, "reciprocal basis needs pure states");
    }
    psi.col(i) = pure_state_ket(ensemble.state(i));
  }
  const ComplexMatrix gram = psi.adjoint() * psi;
  if (n > static_cast<std::size_t>(d) || min_eigenvalue(gram) < 1e-10) {
    throw Error(ErrorCode::kInfeasible, "states are linearly dependent");
  }
  // Reciprocal basis: <dual_i|psi_j> = delta_ij.
  const ComplexMatrix dual = psi * gram.inverse();
  // Work in an orthonormal basis of the span, where the constraint is
  // I_n - sum a_i u_i u_i^dagger >= 0.
  Eigen::HouseholderQR<ComplexMatrix> qr(psi);
  const ComplexMatrix basis =
      qr.householderQ() * ComplexMatrix::Identity(d, static_cast<Index>(n));
  std::vector<ComplexVector> u(n);
  Eigen::VectorXd c(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    ComplexVector ui = dual.col(i).normalized();
    c(i) = ensemble.prior(i) * std::norm(ui.dot(psi.col(i)));
    u[i] = basis.adjoint() * ui;
  }
  const Index m = static_cast<Index>(n);
  auto slack = [&](const Eigen::VectorXd& a) {
    ComplexMatrix s = ComplexMatrix::Identity(m, m);
    for (Index i = 0; i < m; ++i) s -= a(i) * projector(u[i]);
    return s;
  };

  // Interior point: maximize c.a + mu (log det S + sum log a_i) for a
  // decreasing barrier weight, by damped Newton steps.
  ComplexMatrix total = ComplexMatrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) total += projector(u[i]);
  Eigen::VectorXd a =
      Eigen::VectorXd::Constant(m, 0.5 / std::max(max_eigenvalue(total), 1e-12));
  auto barrier_value = [&](const Eigen::VectorXd& x, double mu, bool& ok) {
    ok = x.minCoeff() > 0.0;
    if (!ok) return 0.0;
    Eigen::LLT<ComplexMatrix> llt(hermitian_part(slack(x)));
    if (llt.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    double logdet = 0.0;
    for (Index k = 0; k < m; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k).real());
    if (!std::isfinite(logdet)) {
      ok = false;
      return 0.0;
    }
    return c.dot(x) + mu * (logdet + x.array().log().sum());
  };
  for (double mu = 1e-1; mu > 1e-13; mu *= 0.2) {
    for (int step = 0; step < 100; ++step) {
      const ComplexMatrix sinv = hermitian_part(slack(a)).inverse();
      Eigen::VectorXd g(m);
      Eigen::MatrixXd h(m, m);
      std::vector<ComplexVector> su(n);
      for (Index i = 0; i < m; ++i) su[i] = sinv * u[i];
      for (Index i = 0; i < m; ++i) {
        g(i) = c(i) - mu * u[i].dot(su[i]).real() + mu / a(i);
        for (Index j = 0; j < m; ++j) {
          h(i, j) = -mu * std::norm(u[i].dot(su[j]));
        }
        h(i, i) -= mu / (a(i) * a(i));
      }
      const Eigen::VectorXd dir = (-h).ldlt().solve(g);
      const double decrement = g.dot(dir);
      if (!(decrement > 1e-20)) break;
      bool ok = false;
      const double f0 = barrier_value(a, mu, ok);
      double t = 1.0;
      Eigen::VectorXd next = a;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        next = a + t * dir;
        const double f1 = barrier_value(next, mu, ok);
        if (ok && f1 >= f0 + 0.25 * t * decrement) break;
        ok = false;
      }
      if (!ok) break;
      a = next;
      if (decrement < 1e-14) break;
    }
  }
  // Polish: exact boundary steps coordinate by coordinate.
  for (int sweep = 0; sweep < 200; ++sweep) {
    double gain = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (c(i) <= 0.0) continue;
      const double delta = max_rank_one_step(hermitian_part(slack(a)), u[i]);
      if (delta > 0.0) {
        a(i) += delta;
        gain += c(i) * delta;
      }
    }
    if (gain < 1e-12) break;
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::kNoConvergence, "reciprocal-basis weights diverged");
  }
  std::vector<ComplexMatrix> elements;
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = std::max(a(static_cast<Index>(i)), 0.0);
    elements.push_back(ai * projector(dual.col(i).normalized()));
    coeffs.push_back(ai);
  }
  return finish_usd(ensemble, std::move(elements), std::move(coeffs));
}

// ---------------------------------------------------------------------------

MaxConfResult max_confidence(const Ensemble& ensemble) {
  const std::size_t n = ensemble.size();
  const Index d = ensemble.dim();
  const ComplexMatrix rho = hermitian_part(ensemble.average());
  const ComplexMatrix inv_sqrt = matrix_power(rho, -0.5);
  if (max_abs_entry(inv_sqrt) == 0.0) {
    throw Error(ErrorCode::kSingularEnsemble, "average state has no support");
  }
  MaxConfResult r;
  std::vector<ComplexVector> dirs;
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexMatrix rk =
        hermitian_part(inv_sqrt * ensemble.weighted(k) * inv_sqrt);
    const Eigensystem es = hermitian_eigensystem(rk);
    r.degenerate.push_back(d > 1 && es.values(0) - es.values(1) <= 1e-9);
    dirs.push_back(inv_sqrt * es.vectors.col(0));
  }
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const ComplexVector& b : dirs) sum += projector(b);
  const double uniform = 1.0 / max_eigenvalue(sum);
  std::vector<double> coeffs(n, uniform);
  ComplexMatrix slack = identity(d) - uniform * sum;
  for (std::size_t k = 0; k < n; ++k) {
    const double delta = max_rank_one_step(slack, dirs[k]);
    coeffs[k] += delta;
    slack -= delta * projector(dirs[k]);
  }
  std::vector<ComplexMatrix> elements;
  for (std::size_t k = 0; k < n; ++k) {
    elements.push_back(hermitian_part(coeffs[k] * projector(dirs[k])));
  }
  elements.push_back(hermitian_part(slack));
  r.povm = Povm::assume_valid(std::move(elements));
  r.coefficients = coeffs;
  for (std::size_t k = 0; k < n; ++k) {
    r.confidences.push_back(confidence_of(ensemble, r.povm, k, 0.0));
  }
  r.inconclusive_weight = trace_product(rho, r.povm.element(n));
  return r;
}

double confidence_of(const Ensemble& ensemble, const Povm& povm,
                     std::size_t k, double cert_tol) {
  if (k >= povm.size() || k >= ensemble.size()) {
    throw Error(ErrorCode::kOutOfRange, "outcome index out of range");
  }
  if (povm.dim() != ensemble.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "POVM and ensemble differ in dimension");
  }
  const double click = trace_product(ensemble.average(), povm.element(k));
  if (click <= cert_tol || click <= 0.0) {
    throw Error(ErrorCode::kZeroClickProbability,
                "outcome never clicks on this ensemble");
  }
  return trace_product(ensemble.weighted(k), povm.element(k)) / click;
}

// ---------------------------------------------------------------------------

FixedRateProblem fixed_rate_reduction(const Ensemble& ensemble,
                                      const ComplexMatrix& m_inconclusive) {
  const Index d = ensemble.dim();
  if (m_inconclusive.rows() != d || m_inconclusive.cols() != d ||
      !is_hermitian(m_inconclusive, 1e-9)) {
    throw Error(ErrorCode::kInvalidOperator,
                "inconclusive element must be Hermitian of the state dimension");
  }
  const ComplexMatrix m = hermitian_part(m_inconclusive);
  const Eigen::VectorXd l = hermitian_eigenvalues(m);
  if (l.minCoeff() < -1e-9 || l.maxCoeff() > 1.0 + 1e-9) {
    throw Error(ErrorCode::kInvalidOperator,
                "inconclusive element must satisfy 0 <= M <= I");
  }
  const ComplexMatrix omega = identity(d) - m;
  ComplexMatrix omega_clipped = omega;
  {
    Eigensystem es = hermitian_eigensystem(omega);
    omega_clipped = es.vectors *
                    es.values.cwiseMax(0.0).cast<Complex>().asDiagonal() *
                    es.vectors.adjoint();
  }
  const ComplexMatrix root = matrix_power(hermitian_part(omega_clipped), 0.5);
  const double q = trace_product(ensemble.average(), m);
  if (1.0 - q <= 1e-12) {
    throw Error(ErrorCode::kInvalidOperator,
                "no conclusive probability remains");
  }
  std::vector<double> priors;
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double w = trace_product(omega, ensemble.state(i).matrix());
    if (w <= 1e-14) {
      priors.push_back(0.0);
      states.push_back(DensityMatrix::assume_valid(identity(d) / double(d)));
      continue;
    }
    priors.push_back(ensemble.prior(i) * w);
    states.push_back(DensityMatrix::assume_valid(
        hermitian_part(root * ensemble.state(i).matrix() * root) / w));
  }
  double total = 0.0;
  for (double p : priors) total += p;
  for (double& p : priors) p /= total;
  return FixedRateProblem{m, omega, root, q,
                          Ensemble(std::move(priors), std::move(states))};
}

Povm fixed_rate_lift(const FixedRateProblem& problem, const Povm& projected) {
  std::vector<ComplexMatrix> elements;
  for (const ComplexMatrix& e : projected.elements()) {
    elements.push_back(
        hermitian_part(problem.conclusive_sqrt * e * problem.conclusive_sqrt));
  }
  elements.push_back(problem.inconclusive_element);
  return Povm::assume_valid(std::move(elements));
}

namespace {

double projected_guess(const Ensemble& projected, Povm* povm) {
  if (projected.size() == 2) {
    DiscriminationResult r = helstrom_two_state(projected);
    if (povm) *povm = r.povm;
    return r.p_guess;
  }
  if (projected.dim() == 2) {
    QubitSolution s = solve_qubit(projected);
    if (povm) *povm = s.povm;
    return s.p_guess;
  }
  DiscriminationResult r = solve_fixed_point(projected);
  if (povm) *povm = r.povm;
  return r.p_guess;
}

}  // namespace

FixedRateSolution solve_fixed_rate(const Ensemble& ensemble,
                                   const ComplexMatrix& m_inconclusive) {
  const FixedRateProblem problem =
      fixed_rate_reduction(ensemble, m_inconclusive);
  Povm tilde;
  const double p = projected_guess(problem.projected, &tilde);
  FixedRateSolution s;
  s.rate = problem.rate;
  s.success = (1.0 - problem.rate) * p;
  s.error = (1.0 - problem.rate) * (1.0 - p);
  s.povm = fixed_rate_lift(problem, tilde);
  return s;
}

std::vector<CurvePoint> error_vs_inconclusive_curve(
    const Ensemble& ensemble, std::vector<double> q_grid,
    const CurveOptions& options) {
  if (ensemble.size() != 2) {
    throw Error(ErrorCode::kWrongCount, "the curve needs exactly two states");
  }
  std::sort(q_grid.begin(), q_grid.end());
  const Index d = ensemble.dim();
  const ComplexMatrix rho = hermitian_part(ensemble.average());
  const double base_error = 1.0 - helstrom_two_state(ensemble).p_guess;

  auto ket_of = [d](const Eigen::VectorXd& x) {
    ComplexVector v(d);
    for (Index k = 0; k < d; ++k) v(k) = Complex(x(2 * k), x(2 * k + 1));
    return v;
  };
  // Error of the rank-one element lambda |phi><phi| with tr[rho M] = q.
  auto error_at = [&](const Eigen::VectorXd& x, double q) {
    ComplexVector v = ket_of(x);
    const double nv = v.norm();
    if (!(nv > 1e-12)) return 10.0;
    v /= nv;
    const double w = v.dot(rho * v).real();
    if (w <= 0.0) return 10.0;
    const double lambda = q / w;
    if (lambda > 1.0) return 10.0 + (lambda - 1.0);
    ComplexMatrix m = lambda * projector(v);
    try {
      const FixedRateProblem p = fixed_rate_reduction(ensemble, m);
      const double guess = helstrom_two_state(p.projected).p_guess;
      return (1.0 - p.rate) * (1.0 - guess);
    } catch (const Error&) {
      return 10.0;
    }
  };

  // Deterministic starting directions.
  std::vector<Eigen::VectorXd> starts;
  if (d == 2) {
    const int count = options.starts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double theta = std::acos(z);
      const double phi = golden * k;
      Eigen::VectorXd x(4);
      x << std::cos(theta / 2.0), 0.0, std::sin(theta / 2.0) * std::cos(phi),
          std::sin(theta / 2.0) * std::sin(phi);
      starts.push_back(x);
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < options.starts; ++k) {
      Eigen::VectorXd x(2 * d);
      for (Index j = 0; j < 2 * d; ++j) x(j) = gauss(rng);
      starts.push_back(x.normalized());
    }
  }
  // Directions along eigenvectors of rho always qualify when q is small.
  {
    const Eigensystem es = hermitian_eigensystem(rho);
    for (Index k = 0; k < d; ++k) {
      Eigen::VectorXd x(2 * d);
      for (Index j = 0; j < d; ++j) {
        x(2 * j) = es.vectors(j, k).real();
        x(2 * j + 1) = es.vectors(j, k).imag();
      }
      starts.push_back(x);
    }
  }

  std::vector<CurvePoint> out;
  for (double q : q_grid) {
    CurvePoint pt;
    pt.rate = q;
    if (q <= 0.0) {
      pt.error = base_error;
      pt.family = "min-error";
      out.push_back(pt);
      continue;
    }
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      scored.emplace_back(error_at(starts[k], q), k);
    }
    std::sort(scored.begin(), scored.end());
    double best = scored.front().first;
    const int refine = std::min<int>(options.refine, static_cast<int>(scored.size()));
    for (int r = 0; r < refine; ++r) {
      if (scored[r].first >= 10.0) break;
      const VectorMinimum vm = nelder_mead_minimize(
          [&](const Eigen::VectorXd& x) { return error_at(x, q); },
          starts[scored[r].second], 0.05, 4000, 1e-12);
      best = std::min(best, vm.value);
    }
    pt.feasible = best < 10.0;
    pt.error = pt.feasible ? std::max(best, 0.0) : 1.0;
    pt.family = "rank-one";
    // Mixing an earlier point with abstention reaches q as well.
    for (const CurvePoint& prev : out) {
      if (!prev.feasible || prev.rate >= 1.0) continue;
      const double scaled = (1.0 - q) / (1.0 - prev.rate) * prev.error;
      if (!pt.feasible || scaled < pt.error) {
        pt.error = scaled;
        pt.feasible = true;
        pt.family = "abstain-mixture";
      }
    }
    if (q >= 1.0) {
      pt.error = 0.0;
      pt.feasible = true;
      pt.family = "abstain-mixture";
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace qsd
