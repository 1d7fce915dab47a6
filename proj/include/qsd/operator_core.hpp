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

// Dense complex Hermitian algebra: states, measurements, spectra, Bloch
// geometry, norms and entropies. Everything else in the toolkit is built on
// the types declared here.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsd/errors.hpp"

namespace qsd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using BlochVector = Eigen::Vector3d;
using Index = Eigen::Index;

// Numerical tolerances shared by the validation routines. Every public
// operation that validates input accepts an override.
struct Tolerances {
  double herm = 1e-9;  // max |A - A^dagger| entry for Hermiticity
  double psd = 1e-9;   // most negative eigenvalue tolerated (then clipped)
  double trace = 1e-9;
  double completeness = 1e-8;  // max |sum M_k - I| entry
  double eig = 1e-10;          // spectral reconstruction / support cutoff
};

inline constexpr std::size_t kDefaultDimensionCap = 4096;

// Unit-trace positive Hermitian operator.
class DensityMatrix {
 public:
  // Validates and lightly repairs (Hermitizes, clips tiny negative
  // eigenvalues). Throws NotHermitian, NotPositive or TraceNotOne.
  static DensityMatrix validate(const ComplexMatrix& m,
                                const Tolerances& tol = {});
  // |psi><psi| for a nonzero ket; the ket is normalized first.
  static DensityMatrix from_ket(const ComplexVector& ket);
  // For matrices that are states by construction (tensor powers,
  // reductions of validated states). No checks beyond squareness.
  static DensityMatrix assume_valid(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// Priors q_i with states rho_i of a common dimension.
class Ensemble {
 public:
  Ensemble(std::vector<double> priors, std::vector<DensityMatrix> states,
           const Tolerances& tol = {});
  // Equal priors.
  explicit Ensemble(std::vector<DensityMatrix> states);

  std::size_t size() const { return states_.size(); }
  Index dim() const { return states_.front().dim(); }
  double prior(std::size_t i) const { return priors_[i]; }
  const DensityMatrix& state(std::size_t i) const { return states_[i]; }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<DensityMatrix>& states() const { return states_; }
  // q_i rho_i
  ComplexMatrix weighted(std::size_t i) const;
  // sum_i q_i rho_i
  ComplexMatrix average() const;

 private:
  std::vector<double> priors_;
  std::vector<DensityMatrix> states_;
};

// Positive operators summing to the identity.
class Povm {
 public:
  Povm() = default;
  static Povm validate(std::vector<ComplexMatrix> elements,
                       const Tolerances& tol = {});
  // For measurements complete by construction.
  static Povm assume_valid(std::vector<ComplexMatrix> elements);

  std::size_t size() const { return elements_.size(); }
  Index dim() const { return elements_.empty() ? 0 : elements_[0].rows(); }
  const ComplexMatrix& element(std::size_t k) const { return elements_[k]; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  explicit Povm(std::vector<ComplexMatrix> e) : elements_(std::move(e)) {}
  std::vector<ComplexMatrix> elements_;
};

struct Eigensystem {
  Eigen::VectorXd values;  // descending
  ComplexMatrix vectors;   // column k belongs to values[k]
};

// ---------------------------------------------------------------------------
// Basic constructors and predicates.

ComplexMatrix identity(Index d);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexVector basis_ket(Index d, Index k);
ComplexMatrix projector(const ComplexVector& ket);  // |v><v| (no rescaling)
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

bool is_hermitian(const ComplexMatrix& a, double tol);
ComplexMatrix hermitian_part(const ComplexMatrix& a);
double max_abs_entry(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Spectral routines.

// Descending eigenvalues with orthonormal eigenvectors. Throws NotHermitian
// or NoConvergence.
Eigensystem hermitian_eigensystem(const ComplexMatrix& h,
                                  const Tolerances& tol = {});
// Eigenvalues only, descending; input is Hermitized without checks.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& h);
double min_eigenvalue(const ComplexMatrix& h);
double max_eigenvalue(const ComplexMatrix& h);

// Sum of |eigenvalues| of a Hermitian operator.
double trace_norm(const ComplexMatrix& a, const Tolerances& tol = {});
// Largest singular value.
double operator_norm(const ComplexMatrix& a);

// f(lambda) = lambda^exponent on the support of a PSD operator; kernel
// directions (eigenvalues at or below tol.eig relative to the largest) map to
// zero for every exponent, so exponent 0 gives the support projector and
// negative exponents give support-restricted inverses. Throws NotPositive.
ComplexMatrix matrix_power(const ComplexMatrix& a, double exponent,
                           const Tolerances& tol = {});
ComplexMatrix matrix_power(const DensityMatrix& rho, double exponent,
                           const Tolerances& tol = {});
// Projector onto the support (exponent 0 above).
ComplexMatrix support_projector(const ComplexMatrix& a,
                                const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Bloch geometry (qubits).

// Throws WrongDimension for non-qubit states.
BlochVector to_bloch(const DensityMatrix& rho);
// Throws VectorOutsideBall when |v| > 1 + tol.psd.
DensityMatrix from_bloch(const BlochVector& v, const Tolerances& tol = {});
// (t I + b . sigma) / 2 without validation.
ComplexMatrix bloch_operator(double t, const BlochVector& b);

// ---------------------------------------------------------------------------
// Composite systems.

enum class Subsystem { kA, kB };

// rho^{(x)n}; throws DimensionCapExceeded when d^n exceeds the cap.
DensityMatrix tensor_power(const DensityMatrix& rho, int n,
                           std::size_t cap = kDefaultDimensionCap);
// Same for plain operators (used for unitaries and kets).
ComplexMatrix tensor_power(const ComplexMatrix& a, int n,
                           std::size_t cap = kDefaultDimensionCap);
// Reduced state of one side; throws DimensionMismatch unless dim = dA dB.
DensityMatrix partial_trace(const DensityMatrix& rho_ab, Index da, Index db,
                            Subsystem keep);
ComplexMatrix partial_trace(const ComplexMatrix& x_ab, Index da, Index db,
                            Subsystem keep);

// ---------------------------------------------------------------------------
// Entropies and statistics.

// Bits, with 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);
double shannon_entropy(std::span<const double> p);

// Row i, column k holds p(k | i) = tr[M_k rho_i], clipped to [0, 1].
// Throws DimensionMismatch.
Eigen::MatrixXd outcome_distribution(const Ensemble& ensemble,
                                     const Povm& povm);

// Real part of tr[a b] for Hermitian a and b, without forming the product.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qsd
