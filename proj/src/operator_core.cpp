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

#include "qsd/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qsd {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " must be a nonempty square matrix, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

void require_finite(const ComplexMatrix& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  }
}

Eigensystem eigensystem_unchecked(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNoConvergence, "Hermitian eigensolver failed");
  }
  // Eigen returns ascending order; flip to descending.
  Eigensystem es;
  es.values = solver.eigenvalues().reverse();
  es.vectors = solver.eigenvectors().rowwise().reverse();
  return es;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::validate(const ComplexMatrix& m,
                                      const Tolerances& tol) {
  require_square(m, "density matrix");
  require_finite(m);
  if (!is_hermitian(m, tol.herm)) {
    throw Error(ErrorCode::kNotHermitian,
                "density matrix asymmetry exceeds tolerance");
  }
  ComplexMatrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "trace is " << tr;
    throw Error(ErrorCode::kTraceNotOne, os.str());
  }
  Eigensystem es = eigensystem_unchecked(h);
  const double lmin = es.values.minCoeff();
  if (lmin < -tol.psd) {
    std::ostringstream os;
    os << "eigenvalue " << lmin << " is negative";
    throw Error(ErrorCode::kNotPositive, os.str());
  }
  if (lmin < 0.0) {
    Eigen::VectorXd clipped = es.values.cwiseMax(0.0);
    clipped /= clipped.sum();
    h = es.vectors * clipped.cast<Complex>().asDiagonal() *
        es.vectors.adjoint();
    h = hermitian_part(h);
  }
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::from_ket(const ComplexVector& ket) {
  const double n = ket.norm();
  if (ket.size() == 0 || !(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidArgument, "ket must be nonzero and finite");
  }
  ComplexVector v = ket / n;
  return DensityMatrix(projector(v));
}

DensityMatrix DensityMatrix::assume_valid(ComplexMatrix m) {
  require_square(m, "density matrix");
  return DensityMatrix(std::move(m));
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(std::vector<double> priors,
                   std::vector<DensityMatrix> states, const Tolerances& tol)
    : priors_(std::move(priors)), states_(std::move(states)) {
  if (states_.empty()) {
    throw Error(ErrorCode::kNotDistribution, "ensemble must be nonempty");
  }
  if (priors_.size() != states_.size()) {
    throw Error(ErrorCode::kWrongCount, "priors and states differ in count");
  }
  double sum = 0.0;
  for (double q : priors_) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw Error(ErrorCode::kNotDistribution, "priors must be nonnegative");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "priors sum to " << sum;
    throw Error(ErrorCode::kNotDistribution, os.str());
  }
  for (const DensityMatrix& s : states_) {
    if (s.dim() != states_.front().dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "ensemble states differ in dimension");
    }
  }
}

namespace {

std::vector<double> uniform_priors(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

}  // namespace

Ensemble::Ensemble(std::vector<DensityMatrix> states)
    : Ensemble(uniform_priors(states.size()), states) {}

ComplexMatrix Ensemble::weighted(std::size_t i) const {
  return priors_[i] * states_[i].matrix();
}

ComplexMatrix Ensemble::average() const {
  ComplexMatrix rho = ComplexMatrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < size(); ++i) rho += weighted(i);
  return rho;
}

// ---------------------------------------------------------------------------
// Povm

Povm Povm::validate(std::vector<ComplexMatrix> elements,
                    const Tolerances& tol) {
  if (elements.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "POVM must be nonempty");
  }
  const Index d = elements.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (ComplexMatrix& m : elements) {
    require_square(m, "POVM element");
    require_finite(m);
    if (m.rows() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "POVM elements differ in dimension");
    }
    if (!is_hermitian(m, tol.herm)) {
      throw Error(ErrorCode::kNotHermitian, "POVM element is not Hermitian");
    }
    m = hermitian_part(m);
    if (min_eigenvalue(m) < -tol.psd) {
      throw Error(ErrorCode::kNotPositive, "POVM element is not positive");
    }
    sum += m;
  }
  if (max_abs_entry(sum - identity(d)) > tol.completeness) {
    throw Error(ErrorCode::kIncompleteMeasurement,
                "POVM elements do not sum to the identity");
  }
  return Povm(std::move(elements));
}

Povm Povm::assume_valid(std::vector<ComplexMatrix> elements) {
  return Povm(std::move(elements));
}

// ---------------------------------------------------------------------------
// Basic constructors

ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexVector basis_ket(Index d, Index k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

ComplexMatrix projector(const ComplexVector& ket) {
  return ket * ket.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return max_abs_entry(a - a.adjoint()) <= tol;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

double max_abs_entry(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Spectral routines

Eigensystem hermitian_eigensystem(const ComplexMatrix& h,
                                  const Tolerances& tol) {
  require_square(h, "operator");
  require_finite(h);
  if (!is_hermitian(h, tol.herm)) {
    throw Error(ErrorCode::kNotHermitian, "operator is not Hermitian");
  }
  return eigensystem_unchecked(hermitian_part(h));
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNoConvergence, "Hermitian eigensolver failed");
  }
  return solver.eigenvalues().reverse();
}

double min_eigenvalue(const ComplexMatrix& h) {
  return hermitian_eigenvalues(h).minCoeff();
}

double max_eigenvalue(const ComplexMatrix& h) {
  return hermitian_eigenvalues(h).maxCoeff();
}

double trace_norm(const ComplexMatrix& a, const Tolerances& tol) {
  require_square(a, "operator");
  if (!is_hermitian(a, tol.herm)) {
    throw Error(ErrorCode::kNotHermitian, "trace norm needs a Hermitian input");
  }
  return hermitian_eigenvalues(a).cwiseAbs().sum();
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexMatrix matrix_power(const ComplexMatrix& a, double exponent,
                           const Tolerances& tol) {
  require_square(a, "operator");
  Eigensystem es = hermitian_eigensystem(a, tol);
  const double lmax = std::max(es.values(0), 0.0);
  if (es.values.minCoeff() < -tol.psd * std::max(1.0, lmax)) {
    throw Error(ErrorCode::kNotPositive,
                "matrix power needs a positive semidefinite operator");
  }
  const double cutoff = tol.eig * lmax;
  Eigen::VectorXcd f(es.values.size());
  for (Index k = 0; k < es.values.size(); ++k) {
    const double l = es.values(k);
    f(k) = (l > cutoff && l > 0.0) ? std::pow(l, exponent) : 0.0;
  }
  return es.vectors * f.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix matrix_power(const DensityMatrix& rho, double exponent,
                           const Tolerances& tol) {
  return matrix_power(rho.matrix(), exponent, tol);
}

ComplexMatrix support_projector(const ComplexMatrix& a,
                                const Tolerances& tol) {
  return matrix_power(a, 0.0, tol);
}

// ---------------------------------------------------------------------------
// Bloch geometry

BlochVector to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw Error(ErrorCode::kWrongDimension, "Bloch vectors need a qubit state");
  }
  const ComplexMatrix& m = rho.matrix();
  return BlochVector(2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                     (m(0, 0) - m(1, 1)).real());
}

DensityMatrix from_bloch(const BlochVector& v, const Tolerances& tol) {
  if (!v.allFinite() || v.norm() > 1.0 + tol.psd) {
    throw Error(ErrorCode::kVectorOutsideBall,
                "Bloch vector lies outside the unit ball");
  }
  BlochVector w = v.norm() > 1.0 ? BlochVector(v / v.norm()) : v;
  return DensityMatrix::assume_valid(bloch_operator(1.0, w));
}

ComplexMatrix bloch_operator(double t, const BlochVector& b) {
  ComplexMatrix m(2, 2);
  m << Complex(t + b.z(), 0.0), Complex(b.x(), -b.y()),
      Complex(b.x(), b.y()), Complex(t - b.z(), 0.0);
  return m * 0.5;
}

// ---------------------------------------------------------------------------
// Composite systems

ComplexMatrix tensor_power(const ComplexMatrix& a, int n, std::size_t cap) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "tensor power needs n >= 1");
  }
  double dim = std::pow(static_cast<double>(a.rows()), n);
  if (dim > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "dimension " << a.rows() << "^" << n << " exceeds cap " << cap;
    throw Error(ErrorCode::kDimensionCapExceeded, os.str());
  }
  ComplexMatrix out = a;
  for (int k = 1; k < n; ++k) out = kron(out, a);
  return out;
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n, std::size_t cap) {
  return DensityMatrix::assume_valid(tensor_power(rho.matrix(), n, cap));
}

ComplexMatrix partial_trace(const ComplexMatrix& x, Index da, Index db,
                            Subsystem keep) {
  if (da < 1 || db < 1 || x.rows() != da * db || x.cols() != da * db) {
    throw Error(ErrorCode::kDimensionMismatch,
                "operator dimension is not dA * dB");
  }
  if (keep == Subsystem::kA) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Index i = 0; i < da; ++i)
      for (Index j = 0; j < da; ++j)
        for (Index k = 0; k < db; ++k) out(i, j) += x(i * db + k, j * db + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Index k = 0; k < da; ++k) out += x.block(k * db, k * db, db, db);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho_ab, Index da, Index db,
                            Subsystem keep) {
  return DensityMatrix::assume_valid(
      partial_trace(rho_ab.matrix(), da, db, keep));
}

// ---------------------------------------------------------------------------
// Entropies and statistics

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return std::max(h, 0.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::VectorXd l = hermitian_eigenvalues(rho.matrix());
  std::vector<double> p(l.data(), l.data() + l.size());
  return shannon_entropy(p);
}

Eigen::MatrixXd outcome_distribution(const Ensemble& ensemble,
                                     const Povm& povm) {
  if (povm.dim() != ensemble.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "POVM and ensemble differ in dimension");
  }
  Eigen::MatrixXd p(ensemble.size(), povm.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    for (std::size_t k = 0; k < povm.size(); ++k) {
      const double v =
          trace_product(povm.element(k), ensemble.state(i).matrix());
      p(i, k) = std::clamp(v, 0.0, 1.0);
    }
  }
  return p;
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // tr[a b] = sum_ij a_ij b_ji
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace qsd
