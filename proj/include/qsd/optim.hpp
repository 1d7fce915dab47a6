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

// Small numerical optimizers shared by the solvers: a bounded golden-section
// line minimizer, a Nelder-Mead wrapper over GSL's simplex minimizer, and a
// Lawson-Hanson nonnegative least-squares solver.

#include <functional>

#include <Eigen/Dense>

namespace qsd {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

// Minimizes f over [a, b] by golden-section search until the bracket is
// narrower than x_tol. The endpoints are evaluated too, and win when they
// are at least as good as the interior estimate.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f,
                                      double a, double b, double x_tol);

struct VectorMinimum {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

// Unconstrained Nelder-Mead from x0 with the given initial simplex step.
// Stops when the simplex size drops below size_tol or after max_iter steps.
VectorMinimum nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double step, int max_iter, double size_tol);

struct NnlsSolution {
  Eigen::VectorXd x;
  double residual = 0.0;  // ||A x - b||_2
};

// argmin ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
NnlsSolution nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  int max_iter = 500);

}  // namespace qsd
