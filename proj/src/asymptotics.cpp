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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qsd/optim.hpp"

namespace qsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGridPoints = 101;

// Spectral data of a pair: supported eigenvalues a_i, b_j and squared
// overlaps w_ij of the corresponding eigenvectors.
struct PairSpectrum {
  std::vector<double> a, b;
  Eigen::MatrixXd w;

  double curve(double s) const {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double as = std::pow(a[i], s);
      for (std::size_t j = 0; j < b.size(); ++j) {
        total += as * std::pow(b[j], 1.0 - s) * w(i, j);
      }
    }
    return total;
  }
};

ChernoffResult minimize_curve(const PairSpectrum& ps) {
  ChernoffResult r;
  const double overlap = ps.w.size() == 0 ? 0.0 : ps.w.maxCoeff();
  if (overlap <= 1e-15) {
    r.disjoint_supports = true;
    r.xi = kInf;
    r.minimum = 0.0;
    for (int k = 0; k < kGridPoints; ++k) {
      r.trace_curve.emplace_back(k / 100.0, 0.0);
    }
    return r;
  }
  const auto f = [&ps](double s) { return ps.curve(s); };
  double grid_min = kInf, grid_s = 0.0;
  for (int k = 0; k < kGridPoints; ++k) {
    const double s = k / 100.0;
    const double v = f(s);
    r.trace_curve.emplace_back(s, v);
    if (v < grid_min) {
      grid_min = v;
      grid_s = s;
    }
  }
  const ScalarMinimum m = golden_section_minimize(f, 0.0, 1.0, 1e-10);
  r.s_star = m.x;
  r.minimum = m.value;
  if (grid_min < m.value - 1e-9) {
    r.grid_warning = true;
    r.s_star = grid_s;
    r.minimum = grid_min;
  }
  r.minimum = std::min(r.minimum, 1.0);
  r.xi = -std::log(r.minimum);
  if (r.xi < 0.0) r.xi = 0.0;
  return r;
}

void check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kNotDistribution, "negative probability");
    }
    sum += x;
  }
  if (p.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kNotDistribution, "probabilities must sum to one");
  }
}

double helstrom_error(const ComplexMatrix& a, const ComplexMatrix& b,
                      double q1, double q2) {
  const Eigen::VectorXd l = hermitian_eigenvalues(q1 * a - q2 * b);
  return std::max(0.0, 0.5 * (1.0 - l.cwiseAbs().sum()));
}

// Least squares y = c + k x over the given points.
std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return {n == 1 ? y[0] / x[0] : 0.0, 0.0};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double k = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (my + k * (x[i] - mx));
    rss += e * e;
  }
  return {k, std::sqrt(rss / n)};
}

ExponentEstimate estimate_from(std::vector<int> ns, std::vector<double> ps) {
  ExponentEstimate est;
  est.n_values = std::move(ns);
  est.error_probs = std::move(ps);
  bool vanished = false;
  for (std::size_t i = 0; i < est.n_values.size(); ++i) {
    const double p = est.error_probs[i];
    if (p <= 1e-300) {
      est.rates.push_back(kInf);
      vanished = true;
    } else {
      est.rates.push_back(-std::log(p) / est.n_values[i]);
    }
  }
  if (vanished) {
    est.fitted_exponent = kInf;
    return est;
  }
  const std::size_t total = est.n_values.size();
  const std::size_t first = total / 2;
  std::vector<double> x, y;
  for (std::size_t i = first; i < total; ++i) {
    x.push_back(est.n_values[i]);
    y.push_back(-std::log(est.error_probs[i]));
  }
  const auto [k, res] = fit_slope(x, y);
  est.fitted_exponent = k;
  est.fit_residual = res;
  return est;
}

}  // namespace

ChernoffResult chernoff_two(const DensityMatrix& rho1,
                            const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "states differ in dimension");
  }
  const Eigensystem e1 = hermitian_eigensystem(rho1.matrix());
  const Eigensystem e2 = hermitian_eigensystem(rho2.matrix());
  const Tolerances tol;
  PairSpectrum ps;
  std::vector<Index> i1, i2;
  for (Index k = 0; k < e1.values.size(); ++k) {
    if (e1.values(k) > tol.eig * e1.values(0)) {
      ps.a.push_back(e1.values(k));
      i1.push_back(k);
    }
  }
  for (Index k = 0; k < e2.values.size(); ++k) {
    if (e2.values(k) > tol.eig * e2.values(0)) {
      ps.b.push_back(e2.values(k));
      i2.push_back(k);
    }
  }
  ps.w.resize(static_cast<Index>(i1.size()), static_cast<Index>(i2.size()));
  for (std::size_t i = 0; i < i1.size(); ++i) {
    for (std::size_t j = 0; j < i2.size(); ++j) {
      ps.w(i, j) = std::norm(e1.vectors.col(i1[i]).dot(e2.vectors.col(i2[j])));
    }
  }
  return minimize_curve(ps);
}

ChernoffResult chernoff_classical(std::span<const double> p0,
                                  std::span<const double> p1) {
  check_distribution(p0);
  check_distribution(p1);
  if (p0.size() != p1.size()) {
    throw Error(ErrorCode::kNotDistribution, "alphabets differ in size");
  }
  // Only letters in both supports contribute (0^s 0^{1-s} = 0).
  PairSpectrum ps;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] > 0.0 && p1[i] > 0.0) {
      ps.a.push_back(p0[i]);
      ps.b.push_back(p1[i]);
    }
  }
  ps.w = Eigen::MatrixXd::Identity(static_cast<Index>(ps.a.size()),
                                   static_cast<Index>(ps.b.size()));
  return minimize_curve(ps);
}

MultiChernoff chernoff_multi(std::span<const DensityMatrix> states) {
  if (states.size() < 2) {
    throw Error(ErrorCode::kWrongCount, "need at least two states");
  }
  MultiChernoff best{kInf, 0, 1};
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const double xi = chernoff_two(states[i], states[j]).xi;
      if (xi < best.xi) best = {xi, i, j};
    }
  }
  return best;
}

ExponentEstimate finite_n_error(const DensityMatrix& rho1,
                                const DensityMatrix& rho2, double q1,
                                double q2, int n_max, std::size_t cap) {
  if (rho1.dim() != rho2.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "states differ in dimension");
  }
  if (n_max < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need n_max >= 1");
  }
  if (std::pow(static_cast<double>(rho1.dim()), n_max) >
      static_cast<double>(cap)) {
    throw Error(ErrorCode::kDimensionCapExceeded,
                "d^n_max exceeds the dimension cap");
  }
  std::vector<int> ns;
  std::vector<double> ps;
  ComplexMatrix a = rho1.matrix(), b = rho2.matrix();
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      a = kron(a, rho1.matrix());
      b = kron(b, rho2.matrix());
    }
    ns.push_back(n);
    ps.push_back(helstrom_error(a, b, q1, q2));
  }
  return estimate_from(std::move(ns), std::move(ps));
}

SandwichReport sandwich_check(std::span<const DensityMatrix> states, int n,
                              std::size_t cap,
                              const FixedPointOptions& options) {
  if (states.size() < 2) {
    throw Error(ErrorCode::kWrongCount, "need at least two states");
  }
  if (std::pow(static_cast<double>(states[0].dim()), n) >
      static_cast<double>(cap)) {
    throw Error(ErrorCode::kDimensionCapExceeded,
                "d^n exceeds the dimension cap");
  }
  SandwichReport r;
  r.upper = chernoff_multi(states).xi;
  r.lower = r.upper / 3.0;
  std::vector<int> ns;
  std::vector<double> ps;
  for (int k = 1; k <= n; ++k) {
    std::vector<DensityMatrix> powered;
    for (const DensityMatrix& s : states) {
      powered.push_back(tensor_power(s, k, cap));
    }
    const Ensemble e(std::move(powered));
    const double guess = states.size() == 2
                             ? helstrom_two_state(e).p_guess
                             : solve_fixed_point(e, options).p_guess;
    ns.push_back(k);
    ps.push_back(std::max(0.0, 1.0 - guess));
  }
  r.trend = estimate_from(std::move(ns), std::move(ps));
  r.empirical = r.trend.fitted_exponent;
  const double slack = 0.1 * std::max(r.upper, 1e-12);
  r.within_bounds = r.empirical >= r.lower - slack &&
                    (r.empirical <= r.upper + slack || std::isinf(r.upper));
  return r;
}

double repeated_measurement_sim(const Ensemble& ensemble, const Povm& povm,
                                int n) {
  if (ensemble.size() != 2) {
    throw Error(ErrorCode::kWrongCount, "repeated measurement needs two states");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "need n >= 1");
  const Eigen::MatrixXd p = outcome_distribution(ensemble, povm);
  const int k = static_cast<int>(povm.size());
  const double q1 = ensemble.prior(0), q2 = ensemble.prior(1);
  std::vector<int> counts(k, 0);
  double error = 0.0;
  // Enumerate outcome-count vectors (types) summing to n.
  std::function<void(int, int)> walk = [&](int pos, int left) {
    if (pos == k - 1) {
      counts[pos] = left;
      double log_mult = std::lgamma(n + 1.0);
      double l1 = 0.0, l2 = 0.0;
      bool z1 = false, z2 = false;
      for (int j = 0; j < k; ++j) {
        log_mult -= std::lgamma(counts[j] + 1.0);
        if (counts[j] == 0) continue;
        if (p(0, j) <= 0.0) z1 = true; else l1 += counts[j] * std::log(p(0, j));
        if (p(1, j) <= 0.0) z2 = true; else l2 += counts[j] * std::log(p(1, j));
      }
      const double a = z1 ? 0.0 : q1 * std::exp(log_mult + l1);
      const double b = z2 ? 0.0 : q2 * std::exp(log_mult + l2);
      error += std::min(a, b);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      walk(pos + 1, left - c);
    }
  };
  walk(0, n);
  return error;
}

}  // namespace qsd
