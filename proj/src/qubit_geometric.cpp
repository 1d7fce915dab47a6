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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qsd/optim.hpp"

namespace qsd {

namespace {

struct Candidate {
  BlochVector b;
  double t;
};

bool lexicographically_less(const BlochVector& a, const BlochVector& b) {
  for (int k = 0; k < 3; ++k) {
    if (a(k) != b(k)) return a(k) < b(k);
  }
  return false;
}

// Centers b in the affine hull of the subset with |b - c_i| = t - q_i for all
// i in the subset. Writing b = c_0 + D lambda turns the differences of the
// squared equations into (D^T D) lambda = h + t delta, leaving one quadratic
// in t.
void touching_candidates(const std::vector<WeightedBlochBall>& balls,
                         const std::vector<std::size_t>& subset,
                         std::vector<Candidate>& out) {
  const BlochVector c0 = balls[subset[0]].center;
  const double q0 = balls[subset[0]].weight;
  const int k = static_cast<int>(subset.size()) - 1;
  if (k == 0) {
    out.push_back({c0, q0});
    return;
  }
  Eigen::MatrixXd d(3, k);
  Eigen::VectorXd h(k), delta(k);
  for (int j = 0; j < k; ++j) {
    const WeightedBlochBall& bj = balls[subset[j + 1]];
    const BlochVector e = bj.center - c0;
    d.col(j) = e;
    h(j) = 0.5 * (e.squaredNorm() - bj.weight * bj.weight + q0 * q0);
    delta(j) = bj.weight - q0;
  }
  const Eigen::MatrixXd gram = d.transpose() * d;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return;  // affinely dependent centers
  const Eigen::VectorXd l0 = lu.solve(h);
  const Eigen::VectorXd l1 = lu.solve(delta);
  // |D (l0 + t l1)|^2 = (t - q0)^2
  const double a = l1.dot(gram * l1) - 1.0;
  const double bq = 2.0 * l0.dot(gram * l1) + 2.0 * q0;
  const double c = l0.dot(gram * l0) - q0 * q0;
  std::vector<double> roots;
  if (std::abs(a) < 1e-14) {
    if (std::abs(bq) > 1e-14) roots.push_back(-c / bq);
  } else {
    const double disc = bq * bq - 4.0 * a * c;
    if (disc >= -1e-14) {
      const double sq = std::sqrt(std::max(disc, 0.0));
      roots.push_back((-bq + sq) / (2.0 * a));
      roots.push_back((-bq - sq) / (2.0 * a));
    }
  }
  for (double t : roots) {
    if (!std::isfinite(t)) continue;
    out.push_back({c0 + d * (l0 + t * l1), t});
  }
}

bool feasible(const std::vector<WeightedBlochBall>& balls, const Candidate& c,
              double tol) {
  for (const WeightedBlochBall& ball : balls) {
    if ((c.b - ball.center).norm() > c.t - ball.weight + tol) return false;
  }
  return true;
}

}  // namespace

std::vector<WeightedBlochBall> dual_reduction(const Ensemble& ensemble) {
  if (ensemble.dim() != 2) {
    throw Error(ErrorCode::kWrongDimension,
                "the geometric solver needs qubit states");
  }
  std::vector<WeightedBlochBall> balls;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    balls.push_back(
        {ensemble.prior(i) * to_bloch(ensemble.state(i)), ensemble.prior(i)});
  }
  return balls;
}

std::vector<WeightedBlochBall> dual_reduction(
    const std::vector<double>& priors, const std::vector<BlochVector>& bloch) {
  std::vector<DensityMatrix> states;
  for (const BlochVector& v : bloch) states.push_back(from_bloch(v));
  return dual_reduction(Ensemble(priors, std::move(states)));
}

EnclosingBall min_enclosing_ball_of_balls(
    const std::vector<WeightedBlochBall>& balls, double tol) {
  if (balls.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one ball");
  }
  const std::size_t n = balls.size();
  bool have = false;
  Candidate best{BlochVector::Zero(), std::numeric_limits<double>::infinity()};
  std::vector<Candidate> cands;
  std::vector<std::size_t> subset;
  // Enumerate subsets of size 1..4 in lexicographic order.
  for (std::size_t size = 1; size <= std::min<std::size_t>(4, n); ++size) {
    subset.resize(size);
    for (std::size_t k = 0; k < size; ++k) subset[k] = k;
    while (true) {
      cands.clear();
      touching_candidates(balls, subset, cands);
      for (const Candidate& c : cands) {
        bool touches = true;
        for (std::size_t i : subset) {
          touches = touches && (c.t - balls[i].weight >= -tol);
        }
        if (!touches || !feasible(balls, c, tol)) continue;
        if (!have || c.t < best.t - 1e-13 ||
            (c.t <= best.t + 1e-13 && lexicographically_less(c.b, best.b))) {
          best = c;
          have = true;
        }
      }
      // Next combination.
      std::size_t pos = size;
      while (pos > 0 && subset[pos - 1] == n - size + pos - 1) --pos;
      if (pos == 0) break;
      ++subset[pos - 1];
      for (std::size_t k = pos; k < size; ++k) subset[k] = subset[k - 1] + 1;
    }
  }
  if (!have) {
    // Unreachable for valid input; the full ball around the origin works.
    best = {BlochVector::Zero(), 1.0};
  }
  EnclosingBall out;
  out.center = best.b;
  out.radius = best.t;
  for (std::size_t i = 0; i < n; ++i) {
    const double slack =
        best.t - balls[i].weight - (best.b - balls[i].center).norm();
    if (std::abs(slack) <= 1e3 * tol) out.support.push_back(i);
  }
  return out;
}

bool enclosing_radius_feasible(const std::vector<WeightedBlochBall>& balls,
                               double t, double tol) {
  return t >= min_enclosing_ball_of_balls(balls, tol).radius - tol;
}

Povm reconstruct_povm(const std::vector<BlochVector>& active_w,
                      const std::vector<std::size_t>& active_indices,
                      std::size_t n, double tol) {
  if (active_w.empty() || active_w.size() != active_indices.size()) {
    throw Error(ErrorCode::kReconstructionFailed, "empty active set");
  }
  const Eigen::Index k = static_cast<Eigen::Index>(active_w.size());
  Eigen::MatrixXd a(4, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    a(0, j) = 1.0;
    a.block<3, 1>(1, j) = active_w[j];
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4);
  rhs(0) = 2.0;
  const NnlsSolution sol = nnls(a, rhs);
  if (sol.residual > tol) {
    std::ostringstream os;
    os << "no nonnegative weights complete the measurement (residual "
       << sol.residual << ")";
    throw Error(ErrorCode::kReconstructionFailed, os.str());
  }
  std::vector<ComplexMatrix> elements(n, ComplexMatrix::Zero(2, 2));
  for (Eigen::Index j = 0; j < k; ++j) {
    elements[active_indices[j]] = bloch_operator(sol.x(j), -sol.x(j) * active_w[j]);
  }
  // Absorb the tiny least-squares defect so the result is exactly complete.
  ComplexMatrix total = ComplexMatrix::Zero(2, 2);
  for (const ComplexMatrix& e : elements) total += e;
  const ComplexMatrix defect = identity(2) - total;
  for (Eigen::Index j = 0; j < k; ++j) {
    elements[active_indices[j]] += defect / static_cast<double>(k);
  }
  return Povm::assume_valid(std::move(elements));
}

QubitSolution solve_qubit(const Ensemble& ensemble,
                          const QubitOptions& options) {
  const std::vector<WeightedBlochBall> balls = dual_reduction(ensemble);
  const std::size_t n = balls.size();
  QubitSolution sol;
  sol.ball = min_enclosing_ball_of_balls(balls, options.geo_tol);
  const double t = sol.ball.radius;
  const BlochVector& b = sol.ball.center;
  sol.p_guess = t;
  sol.symmetry_operator = bloch_operator(t, b);

  std::optional<std::size_t> dominant;
  sol.complementary_bloch.resize(n);
  std::vector<BlochVector> active_w;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = t - balls[i].weight;
    if (r <= options.geo_tol) {
      if (!dominant) dominant = i;
      continue;
    }
    BlochVector w = (b - balls[i].center) / r;
    sol.complementary_bloch[i] = w;
    if (w.norm() >= 1.0 - kActiveThreshold) {
      sol.active_set.push_back(i);
      active_w.push_back(w.normalized());
    }
  }

  Povm povm;
  bool ok = true;
  if (dominant) {
    // K = q_j rho_j: guessing j without measuring is optimal.
    sol.trivial_guess = true;
    sol.active_set = {*dominant};
    std::vector<ComplexMatrix> elements(n, ComplexMatrix::Zero(2, 2));
    elements[*dominant] = identity(2);
    povm = Povm::assume_valid(std::move(elements));
  } else {
    try {
      povm = reconstruct_povm(active_w, sol.active_set, n);
    } catch (const Error&) {
      ok = false;
    }
  }
  if (ok) {
    sol.certificate = check_optimality(ensemble, povm, options.cert_tol);
    ok = sol.certificate.passed;
  }
  if (!ok) {
    FixedPointOptions fp;
    fp.cert_tol = options.cert_tol;
    DiscriminationResult r = solve_fixed_point(ensemble, fp);
    sol.fallback_used = true;
    sol.certificate = r.certificate;
    povm = r.povm;
  }
  sol.povm = std::move(povm);
  return sol;
}

}  // namespace qsd
