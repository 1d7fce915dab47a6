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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qsd {

namespace {

void require_matching(const Ensemble& ensemble, const Povm& povm) {
  if (povm.size() != ensemble.size()) {
    std::ostringstream os;
    os << "POVM has " << povm.size() << " elements for " << ensemble.size()
       << " states";
    throw Error(ErrorCode::kWrongCount, os.str());
  }
  if (povm.dim() != ensemble.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "POVM and ensemble differ in dimension");
  }
}

ComplexMatrix symmetry_operator(const Ensemble& ensemble, const Povm& povm) {
  ComplexMatrix k = ComplexMatrix::Zero(ensemble.dim(), ensemble.dim());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    k += ensemble.weighted(i) * povm.element(i);
  }
  return hermitian_part(k);
}

double dual_gap_of(const Ensemble& ensemble, const ComplexMatrix& k) {
  double gap = 0.0;
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    gap = std::max(gap, -min_eigenvalue(k - ensemble.weighted(j)));
  }
  return gap;
}

double primal_value(const Ensemble& ensemble, const Povm& povm) {
  double p = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    p += trace_product(ensemble.weighted(i), povm.element(i));
  }
  return p;
}

OptimalityCertificate certify(const Ensemble& ensemble, const Povm& povm,
                              const ComplexMatrix& k, double cert_tol) {
  OptimalityCertificate c;
  c.tolerance = cert_tol;
  c.dual_feasibility_gap = dual_gap_of(ensemble, k);
  const double trk = k.trace().real();
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const ComplexMatrix slack = k - ensemble.weighted(i);
    c.complementarity_residual =
        std::max(c.complementarity_residual,
                 std::abs(trace_product(slack, povm.element(i))));
    for (std::size_t j = i + 1; j < ensemble.size(); ++j) {
      const ComplexMatrix diff = ensemble.weighted(i) - ensemble.weighted(j);
      c.pairwise_residual =
          std::max(c.pairwise_residual,
                   operator_norm(povm.element(i) * diff * povm.element(j)));
    }
  }
  c.primal_dual_gap = trk - primal_value(ensemble, povm);
  c.passed = c.dual_feasibility_gap <= cert_tol &&
             c.complementarity_residual <= cert_tol &&
             c.pairwise_residual <= cert_tol &&
             std::abs(c.primal_dual_gap) <= cert_tol;
  return c;
}

}  // namespace

OptimalityCertificate check_optimality(const Ensemble& ensemble,
                                       const Povm& povm, double cert_tol) {
  require_matching(ensemble, povm);
  return certify(ensemble, povm, symmetry_operator(ensemble, povm), cert_tol);
}

DiscriminationResult evaluate_candidate(const Ensemble& ensemble, Povm povm,
                                        double cert_tol) {
  require_matching(ensemble, povm);
  DiscriminationResult r;
  r.symmetry_operator = symmetry_operator(ensemble, povm);
  r.certificate = certify(ensemble, povm, r.symmetry_operator, cert_tol);
  r.p_guess = primal_value(ensemble, povm);
  const double trk = r.symmetry_operator.trace().real();
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double ri = trk - ensemble.prior(i);
    r.residuals.push_back(ri);
    if (ri > cert_tol) {
      r.complementary_states.emplace_back(
          (r.symmetry_operator - ensemble.weighted(i)) / ri);
    } else {
      r.complementary_states.emplace_back(std::nullopt);
    }
  }
  r.povm = std::move(povm);
  return r;
}

// ---------------------------------------------------------------------------

DiscriminationResult helstrom_two_state(const Ensemble& ensemble,
                                        double cert_tol) {
  if (ensemble.size() != 2) {
    throw Error(ErrorCode::kWrongCount, "Helstrom needs exactly two states");
  }
  const Tolerances tol;
  const ComplexMatrix x =
      hermitian_part(ensemble.weighted(0) - ensemble.weighted(1));
  const Eigensystem es = hermitian_eigensystem(x, tol);
  const Index d = ensemble.dim();
  ComplexMatrix m1 = ComplexMatrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    if (es.values(k) > tol.eig) m1 += projector(es.vectors.col(k));
  }
  ComplexMatrix m2 = identity(d) - m1;
  DiscriminationResult r = evaluate_candidate(
      ensemble, Povm::assume_valid({hermitian_part(m1), hermitian_part(m2)}),
      cert_tol);
  r.p_guess = 0.5 + 0.5 * es.values.cwiseAbs().sum();
  return r;
}

// ---------------------------------------------------------------------------

Povm square_root_measurement(const Ensemble& ensemble) {
  const Index d = ensemble.dim();
  const ComplexMatrix rho = hermitian_part(ensemble.average());
  const ComplexMatrix inv_sqrt = matrix_power(rho, -0.5);
  const ComplexMatrix kernel = identity(d) - support_projector(rho);
  const double share = 1.0 / static_cast<double>(ensemble.size());
  std::vector<ComplexMatrix> elements;
  elements.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    elements.push_back(hermitian_part(
        inv_sqrt * ensemble.weighted(i) * inv_sqrt + share * kernel));
  }
  return Povm::assume_valid(std::move(elements));
}

DiscriminationResult solve_fixed_point(const Ensemble& ensemble,
                                       const FixedPointOptions& options) {
  const std::size_t n = ensemble.size();
  const Index d = ensemble.dim();
  const ComplexMatrix eye = identity(d);

  std::vector<ComplexMatrix> m;
  if (options.seed) {
    require_matching(ensemble, *options.seed);
    m = options.seed->elements();
  } else {
    m = square_root_measurement(ensemble).elements();
    bool usable = true;
    for (const ComplexMatrix& e : m) usable = usable && e.allFinite();
    if (!usable) m.assign(n, eye / static_cast<double>(n));
  }
  std::vector<ComplexMatrix> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = ensemble.weighted(i);

  auto primal = [&](const std::vector<ComplexMatrix>& mm) {
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) p += trace_product(r[i], mm[i]);
    return p;
  };

  bool monotone = true;
  double last = primal(m);
  int iter = 0;
  // Once the certificate passes, keep iterating for a while (bounded by a
  // multiple of the work done so far) towards a suboptimality bound d * gap
  // well inside the tolerance, so the reported value is sharper than the
  // certificate threshold.
  const double sharp_gap = options.cert_tol / (10.0 * static_cast<double>(d));
  int stop_at = options.max_iter;
  bool certified = false;
  for (;; ++iter) {
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) k += r[i] * m[i];
    const double gap = dual_gap_of(ensemble, hermitian_part(k));
    if (iter >= stop_at) break;
    if (gap <= options.cert_tol &&
        check_optimality(ensemble, Povm::assume_valid(m), options.cert_tol)
            .passed) {
      if (gap <= sharp_gap) break;
      if (!certified) stop_at = std::min(options.max_iter, 10 * iter + 50);
      certified = true;
    }
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    std::vector<ComplexMatrix> rm(n);
    for (std::size_t i = 0; i < n; ++i) {
      rm[i] = r[i] * m[i] * r[i];
      g += rm[i];
    }
    const ComplexMatrix g_inv_sqrt = matrix_power(hermitian_part(g), -0.5);
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = hermitian_part(g_inv_sqrt * rm[i] * g_inv_sqrt);
      total += m[i];
    }
    // The update is complete only on the support of G; share the rest.
    const ComplexMatrix rest =
        hermitian_part(eye - total) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) m[i] += rest;
    const double value = primal(m);
    if (value < last - 1e-10) monotone = false;
    last = value;
  }
  DiscriminationResult best =
      evaluate_candidate(ensemble, Povm::assume_valid(m), options.cert_tol);
  // The iterate approaches the optimum from below; when always naming the
  // likeliest state is (near-)optimal, report that exact strategy instead so
  // the result never falls below max_i q_i.
  const auto top = std::max_element(ensemble.priors().begin(),
                                    ensemble.priors().end());
  if (*top >= best.p_guess) {
    std::vector<ComplexMatrix> trivial(n, ComplexMatrix::Zero(d, d));
    trivial[static_cast<std::size_t>(top - ensemble.priors().begin())] = eye;
    DiscriminationResult alt = evaluate_candidate(
        ensemble, Povm::assume_valid(std::move(trivial)), options.cert_tol);
    if (alt.certificate.passed || !best.certificate.passed) best = std::move(alt);
  }
  best.iterations = iter;
  best.converged = best.certificate.passed;
  best.monotone = monotone;
  return best;
}

DiscriminationResult solve_fixed_point_or_throw(
    const Ensemble& ensemble, const FixedPointOptions& options) {
  DiscriminationResult r = solve_fixed_point(ensemble, options);
  if (!r.converged) {
    std::ostringstream os;
    os << "certificate not reached after " << r.iterations
       << " iterations (dual gap " << r.certificate.dual_feasibility_gap
       << ")";
    throw Error(ErrorCode::kNoConvergence, os.str());
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void check_gu_inputs(std::span<const double> c, int d, int copies,
                     std::size_t cap) {
  if (d < 1 || static_cast<int>(c.size()) != d) {
    throw Error(ErrorCode::kBadCoefficients,
                "need exactly d coefficients for dimension d");
  }
  double norm = 0.0;
  for (double x : c) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kBadCoefficients,
                  "coefficients must be nonnegative");
    }
    norm += x * x;
  }
  if (std::abs(norm - 1.0) > 1e-9) {
    throw Error(ErrorCode::kBadCoefficients,
                "squared coefficients must sum to one");
  }
  if (copies < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one copy");
  }
  if (std::pow(static_cast<double>(d), copies) > static_cast<double>(cap)) {
    throw Error(ErrorCode::kDimensionCapExceeded,
                "d^copies exceeds the dimension cap");
  }
}

}  // namespace

Ensemble gu_ensemble(std::span<const double> coefficients, int d, int copies,
                     std::size_t cap) {
  check_gu_inputs(coefficients, d, copies, cap);
  std::vector<DensityMatrix> states;
  for (int a = 0; a < d; ++a) {
    ComplexVector psi(d);
    for (int n = 0; n < d; ++n) {
      psi(n) = coefficients[n] *
               std::polar(1.0, 2.0 * std::numbers::pi * n * a / d);
    }
    ComplexVector full = psi;
    for (int k = 1; k < copies; ++k) full = kron(full, psi);
    states.push_back(DensityMatrix::from_ket(full));
  }
  return Ensemble(std::move(states));
}

double gu_guessing_probability(std::span<const double> coefficients, int d,
                               int copies, std::size_t cap) {
  check_gu_inputs(coefficients, d, copies, cap);
  // <psi_m|psi_0> = sum_n c_n^2 e^{-2 pi i n m / d}
  std::vector<Complex> overlap(d);
  for (int m = 0; m < d; ++m) {
    Complex s = 0.0;
    for (int n = 0; n < d; ++n) {
      s += coefficients[n] * coefficients[n] *
           std::polar(1.0, -2.0 * std::numbers::pi * n * m / d);
    }
    overlap[m] = std::pow(s, copies);
  }
  Complex total = 0.0;
  for (int eta = 0; eta < d; ++eta) {
    Complex inner = 0.0;
    for (int m = 0; m < d; ++m) {
      inner += std::polar(1.0, 2.0 * std::numbers::pi * eta * m / d) *
               overlap[m];
    }
    total += std::sqrt(inner);  // principal branch
  }
  return std::norm(total) / (static_cast<double>(d) * d);
}

// ---------------------------------------------------------------------------

Ensemble mirror_symmetric_ensemble(double p, double theta) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw Error(ErrorCode::kOutOfRange, "side prior must lie in [0, 1/2]");
  }
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector plus(2), minus(2);
  plus << s, s;
  minus << s, -s;
  const double c = std::cos(theta), sn = std::sin(theta);
  return Ensemble({p, p, 1.0 - 2.0 * p},
                  {DensityMatrix::from_ket(c * plus + sn * minus),
                   DensityMatrix::from_ket(c * plus - sn * minus),
                   DensityMatrix::from_ket(plus)});
}

double mirror_symmetric_threshold(double theta) {
  const double c = std::cos(theta);
  return 1.0 / (2.0 + c * (c + std::sin(theta)));
}

double mirror_symmetric_guess(double p, double theta) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw Error(ErrorCode::kOutOfRange, "side prior must lie in [0, 1/2]");
  }
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::kOutOfRange, "angle must lie in [0, pi/2]");
  }
  const double c = std::cos(theta), s = std::sin(theta);
  if (p >= mirror_symmetric_threshold(theta)) {
    return p * (1.0 + std::sin(2.0 * theta));
  }
  const double q3 = 1.0 - 2.0 * p;
  return q3 * (p * s * s + q3 - p * c * c) / (q3 - p * c * c);
}

// ---------------------------------------------------------------------------

double classical_guess(const Eigen::MatrixXd& joint) {
  if (joint.size() == 0 || !joint.allFinite() ||
      joint.minCoeff() < -1e-12 || std::abs(joint.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kNotDistribution,
                "joint table must be a probability distribution");
  }
  return joint.colwise().maxCoeff().sum();
}

double classical_guess_distance(const Eigen::MatrixXd& joint) {
  return classical_guess(joint) - 1.0 / static_cast<double>(joint.rows());
}

GeneralForm general_form_report(const DiscriminationResult& result,
                                std::size_t n) {
  if (!result.certificate.passed) {
    throw Error(ErrorCode::kCertificateFailed,
                "general form needs a certified optimum");
  }
  if (n == 0 || result.residuals.size() != n) {
    throw Error(ErrorCode::kWrongCount, "residual count differs from N");
  }
  GeneralForm g;
  g.uniform_term = 1.0 / static_cast<double>(n);
  g.residuals = result.residuals;
  double sum = 0.0;
  for (double r : g.residuals) sum += r;
  g.average_residual = sum / static_cast<double>(n);
  const auto [lo, hi] = std::minmax_element(g.residuals.begin(), g.residuals.end());
  g.residuals_equal = (*hi - *lo) <= result.certificate.tolerance;
  return g;
}

}  // namespace qsd
