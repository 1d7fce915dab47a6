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


#include "qsd/applications.hpp"

#include <Eigen/Eigenvalues>
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

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dimension witness

double witness_value(const WitnessTable& table, int n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "witness needs N >= 2");
  double w = 0.0;
  std::ostringstream missing;
  int n_missing = 0;
  for (int x = 2; x <= n; ++x) {
    for (int y = 1; y < x; ++y) {
      const auto a = table.find({x, y});
      const auto b = table.find({y, x});
      if (a == table.end() || b == table.end()) {
        if (n_missing++ < 8) missing << " (" << x << "," << y << ")";
        continue;
      }
      for (double p : {a->second, b->second}) {
        if (!(p >= 0.0 && p <= 1.0)) {
          throw Error(ErrorCode::kOutOfRange,
                      "witness probability outside [0, 1]");
        }
      }
      const double diff = a->second - b->second;
      w += diff * diff;
    }
  }
  if (n_missing > 0) {
    throw Error(ErrorCode::kMissingPairs,
                "witness table lacks " + std::to_string(n_missing) +
                    " pair(s):" + missing.str());
  }
  return w;
}

double witness_bound(int n, int d) {
  if (n < 2 || d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "witness bound needs N>=2, d>=1");
  }
  const double m = std::min(d, n);
  return 0.5 * n * n * (1.0 - 1.0 / m);
}

WitnessReport witness_report(const WitnessTable& table, int n,
                             double cert_tol) {
  WitnessReport report;
  report.n = n;
  report.value = witness_value(table, n);
  report.certified_min_dimension = n;
  bool found = false;
  for (int d = 1; d <= n; ++d) {
    report.bounds[d] = witness_bound(n, d);
    if (!found && report.value <= report.bounds[d] + cert_tol) {
      report.certified_min_dimension = d;
      found = true;
    }
  }
  return report;
}

WitnessTable read_witness_csv(std::istream& in) {
  WitnessTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (t.find_first_of("0123456789") == std::string::npos ||
          std::isalpha(static_cast<unsigned char>(t[0]))) {
        continue;  // header row
      }
    }
    std::stringstream ss(t);
    std::string fx, fy, fp;
    if (!std::getline(ss, fx, ',') || !std::getline(ss, fy, ',') ||
        !std::getline(ss, fp)) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected x,x',p");
    }
    try {
      std::size_t used = 0;
      const int x = std::stoi(trim(fx), &used);
      const int y = std::stoi(trim(fy));
      const double p = std::stod(trim(fp));
      if (x < 1 || y < 1 || x == y) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) +
                        ": labels must be distinct positive integers");
      }
      table[{x, y}] = p;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": bad number");
    }
  }
  return table;
}

WitnessTable simulate_witness_table(const std::vector<DensityMatrix>& states) {
  WitnessTable table;
  const int n = static_cast<int>(states.size());
  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y < x; ++y) {
      const ComplexMatrix diff =
          states[x - 1].matrix() - states[y - 1].matrix();
      const Eigensystem es = hermitian_eigensystem(hermitian_part(diff));
      ComplexMatrix m = ComplexMatrix::Zero(diff.rows(), diff.cols());
      for (Index k = 0; k < es.values.size(); ++k) {
        if (es.values[k] > 1e-12) m += projector(es.vectors.col(k));
      }
      table[{x, y}] = trace_product(m, states[x - 1].matrix());
      table[{y, x}] = trace_product(m, states[y - 1].matrix());
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Min-entropy

MinEntropyResult min_entropy(const Ensemble& ensemble) {
  MinEntropyResult r;
  if (ensemble.dim() == 2) {
    const QubitSolution s = solve_qubit(ensemble);
    r.p_guess = s.p_guess;
    r.certified = s.certificate.passed;
    r.solver = "qubit-geometric";
  } else {
    const DiscriminationResult s = solve_fixed_point(ensemble);
    r.p_guess = s.p_guess;
    r.certified = s.certificate.passed;
    r.solver = "fixed-point";
  }
  r.bits = -std::log2(r.p_guess);
  return r;
}

// ---------------------------------------------------------------------------
// Steering and the no-signaling bound

SteeringScenario steering_build(const DensityMatrix& shared_state,
                                Index dim_a, Index dim_b,
                                const std::vector<ComplexMatrix>& alice) {
  if (dim_a < 1 || dim_b < 1 || shared_state.dim() != dim_a * dim_b) {
    throw Error(ErrorCode::kDimensionMismatch,
                "shared state dimension must equal dA * dB");
  }
  const ComplexMatrix& psi = shared_state.matrix();
  const double purity = trace_product(psi, psi);
  if (purity < 1.0 - 1e-8) {
    throw Error(ErrorCode::kInvalidArgument, "shared state must be pure");
  }
  if (alice.empty()) {
    throw Error(ErrorCode::kWrongCount, "Alice needs at least one measurement");
  }
  const Tolerances tol;
  SteeringScenario sc{shared_state, dim_a, dim_b, alice, {}, {}, 0.0};
  sc.bob_marginal = partial_trace(psi, dim_a, dim_b, Subsystem::kB);
  const ComplexMatrix id_a = identity(dim_a);
  const ComplexMatrix id_b = identity(dim_b);
  for (const ComplexMatrix& m : alice) {
    if (m.rows() != dim_a || m.cols() != dim_a) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "Alice's element must act on A");
    }
    if (!is_hermitian(m, tol.herm)) {
      throw Error(ErrorCode::kIncompleteMeasurement,
                  "Alice's element is not Hermitian");
    }
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    if (ev.minCoeff() < -tol.psd || ev.maxCoeff() > 1.0 + tol.psd) {
      throw Error(ErrorCode::kIncompleteMeasurement,
                  "{M, I - M} is not a measurement: need 0 <= M <= I");
    }
    const ComplexMatrix mh = hermitian_part(m);
    SteeredPair pair;
    const auto steer = [&](const ComplexMatrix& e, double& prob)
        -> std::optional<ComplexMatrix> {
      const ComplexMatrix root = kron(matrix_power(e, 0.5), id_b);
      const ComplexMatrix post = hermitian_part(root * psi * root);
      prob = std::clamp(post.trace().real(), 0.0, 1.0);
      if (prob <= 1e-12) return std::nullopt;
      return ComplexMatrix(
          hermitian_part(partial_trace(post, dim_a, dim_b, Subsystem::kB)) /
          prob);
    };
    double p_sigma = 0.0;
    pair.rho = steer(mh, pair.p);
    pair.sigma = steer(id_a - mh, p_sigma);
    ComplexMatrix mix = ComplexMatrix::Zero(dim_b, dim_b);
    if (pair.rho) mix += pair.p * *pair.rho;
    if (pair.sigma) mix += p_sigma * *pair.sigma;
    sc.consistency_residual =
        std::max(sc.consistency_residual, max_abs_entry(mix - sc.bob_marginal));
    sc.pairs.push_back(std::move(pair));
  }
  return sc;
}

NoSignalingReport nosignaling_saturation(const Ensemble& ensemble,
                                         double cert_tol) {
  NoSignalingReport r;
  ComplexMatrix k;
  Povm povm;
  if (ensemble.dim() == 2) {
    QubitOptions opts;
    opts.cert_tol = cert_tol;
    const QubitSolution s = solve_qubit(ensemble, opts);
    povm = s.povm;
    k = s.symmetry_operator;
    r.solver = "qubit-geometric";
  } else {
    FixedPointOptions opts;
    opts.cert_tol = cert_tol;
    const DiscriminationResult s = solve_fixed_point(ensemble, opts);
    povm = s.povm;
    k = s.symmetry_operator;
    r.solver = "fixed-point";
  }
  // Primal value of the measurement, independent of the dual operator, so
  // that p_guess * sum_i p_i = primal / dual is a genuine check.
  r.p_guess = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    r.p_guess += trace_product(ensemble.weighted(i), povm.element(i));
  }
  const double tr_k = k.trace().real();
  r.sum_p = 0.0;
  r.decomposition_residual = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double p = ensemble.prior(i) / tr_k;
    r.p.push_back(p);
    r.sum_p += p;
    // K/trK - p_i rho_i must be a nonnegative multiple of a state.
    const double lam = min_eigenvalue(k - ensemble.weighted(i)) / tr_k;
    r.decomposition_residual = std::max(r.decomposition_residual, -lam);
  }
  r.product = r.p_guess * r.sum_p;
  r.passed = std::abs(r.product - 1.0) <= cert_tol &&
             r.decomposition_residual <= cert_tol;
  return r;
}

// ---------------------------------------------------------------------------
// State exclusion

namespace {

// K = Herm(sum_i R_i M_i) shifted down until K <= R_i for every i.
ComplexMatrix exclusion_dual(const std::vector<ComplexMatrix>& r,
                             const std::vector<ComplexMatrix>& m) {
  const Index d = r.front().rows();
  ComplexMatrix k = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < r.size(); ++i) k += r[i] * m[i];
  k = hermitian_part(k);
  double shift = 0.0;
  for (const auto& ri : r) shift = std::max(shift, max_eigenvalue(k - ri));
  return k - shift * identity(d);
}

double exclusion_value(const std::vector<ComplexMatrix>& r,
                       const std::vector<ComplexMatrix>& m) {
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) v += trace_product(r[i], m[i]);
  return v;
}

ComplexMatrix psd_clip(const ComplexMatrix& a) {
  const Eigensystem es = hermitian_eigensystem(hermitian_part(a));
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Index k = 0; k < es.values.size(); ++k) {
    if (es.values[k] > 0.0) out += es.values[k] * projector(es.vectors.col(k));
  }
  return out;
}

// Euclidean projection onto {M_i >= 0, sum_i M_i = I} by Dykstra's method.
std::vector<ComplexMatrix> project_povm(std::vector<ComplexMatrix> x,
                                        int sweeps) {
  const std::size_t n = x.size();
  const Index d = x.front().rows();
  std::vector<ComplexMatrix> p(n, ComplexMatrix::Zero(d, d));
  std::vector<ComplexMatrix> q(n, ComplexMatrix::Zero(d, d));
  std::vector<ComplexMatrix> y(n);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = psd_clip(x[i] + p[i]);
      p[i] = x[i] + p[i] - y[i];
    }
    ComplexMatrix excess = -identity(d);
    for (std::size_t i = 0; i < n; ++i) excess += y[i] + q[i];
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const ComplexMatrix next = y[i] + q[i] - excess / static_cast<double>(n);
      q[i] = y[i] + q[i] - next;
      change = std::max(change, max_abs_entry(next - x[i]));
      x[i] = next;
    }
    if (change < 1e-13) break;
  }
  return x;
}

// Turns an approximate POVM into an exact one: clip, then conjugate by
// S^{-1/2} with S = sum_i M_i (kernel of S shared evenly).
std::vector<ComplexMatrix> repair_povm(std::vector<ComplexMatrix> m) {
  const Index d = m.front().rows();
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (auto& e : m) {
    e = psd_clip(e);
    s += e;
  }
  const ComplexMatrix inv_root = matrix_power(hermitian_part(s), -0.5);
  const ComplexMatrix ker = identity(d) - support_projector(hermitian_part(s));
  for (auto& e : m) {
    e = hermitian_part(inv_root * e * inv_root) +
        ker / static_cast<double>(m.size());
  }
  return m;
}

struct PgCandidate {
  std::vector<ComplexMatrix> m;
  double value = 0.0;
  double gap = std::numeric_limits<double>::infinity();
};

PgCandidate projected_gradient(const std::vector<ComplexMatrix>& r,
                               std::vector<ComplexMatrix> m, int iterations,
                               double cert_tol) {
  double scale = 0.0;
  for (const auto& ri : r) scale = std::max(scale, max_eigenvalue(ri));
  const double step = 1.0 / std::max(scale, 1e-300);
  PgCandidate best;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] -= step * r[i];
    m = project_povm(std::move(m), 200);
    if (it % 25 == 24 || it + 1 == iterations) {
      PgCandidate c;
      c.m = repair_povm(m);
      c.value = exclusion_value(r, c.m);
      c.gap = c.value - exclusion_dual(r, c.m).trace().real();
      if (c.gap < best.gap) best = c;
      if (best.gap <= cert_tol) break;
    }
  }
  return best;
}

struct BarrierCandidate {
  std::vector<ComplexMatrix> m;
  ComplexMatrix k;
  double value = 0.0;
  double gap = std::numeric_limits<double>::infinity();
};

// Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices.
std::vector<ComplexMatrix> hermitian_basis(Index d) {
  std::vector<ComplexMatrix> basis;
  const double h = 1.0 / std::sqrt(2.0);
  for (Index a = 0; a < d; ++a) {
    ComplexMatrix e = ComplexMatrix::Zero(d, d);
    e(a, a) = 1.0;
    basis.push_back(e);
    for (Index b = a + 1; b < d; ++b) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d);
      re(a, b) = re(b, a) = h;
      basis.push_back(re);
      ComplexMatrix im = ComplexMatrix::Zero(d, d);
      im(a, b) = Complex(0.0, -h);
      im(b, a) = Complex(0.0, h);
      basis.push_back(im);
    }
  }
  return basis;
}

// Path-following Newton method on the dual: maximize
//   tr K + mu sum_i log det(R_i - K)
// for decreasing mu. On the central path M_i = mu (R_i - K)^{-1} sums to the
// identity and the duality gap equals mu n d.
BarrierCandidate barrier_exclusion(const std::vector<ComplexMatrix>& r,
                                   double cert_tol) {
  const std::size_t n = r.size();
  const Index d = r.front().rows();
  const std::vector<ComplexMatrix> basis = hermitian_basis(d);
  const Index nb = static_cast<Index>(basis.size());
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& ri : r) floor = std::min(floor, min_eigenvalue(ri));
  ComplexMatrix k = (floor - 1.0) * identity(d);

  // Inverses of R_i - K; nullopt when some slack is not positive definite.
  const auto slack_inverses = [&](const ComplexMatrix& kk)
      -> std::optional<std::vector<ComplexMatrix>> {
    std::vector<ComplexMatrix> inv(n);
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::LLT<ComplexMatrix> llt(hermitian_part(r[i] - kk));
      if (llt.info() != Eigen::Success) return std::nullopt;
      inv[i] = llt.solve(identity(d));
    }
    return inv;
  };
  const auto objective = [&](const ComplexMatrix& kk, double mu) {
    double f = -kk.trace().real();
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::LLT<ComplexMatrix> llt(hermitian_part(r[i] - kk));
      const auto diag = llt.matrixL().toDenseMatrix().diagonal();
      for (Index a = 0; a < d; ++a) f -= 2.0 * mu * std::log(diag(a).real());
    }
    return f;
  };

  const double mu_final =
      0.1 * cert_tol / static_cast<double>(n * static_cast<std::size_t>(d));
  BarrierCandidate best;
  for (double mu = 1.0; ; mu = std::max(mu * 0.1, mu_final)) {
    for (int newton = 0; newton < 100; ++newton) {
      const auto inv = slack_inverses(k);
      if (!inv) return best;
      Eigen::VectorXd grad(nb);
      Eigen::MatrixXd hess(nb, nb);
      std::vector<std::vector<ComplexMatrix>> sbs(n);
      for (std::size_t i = 0; i < n; ++i) {
        sbs[i].reserve(basis.size());
        for (const auto& b : basis) sbs[i].push_back((*inv)[i] * b);
      }
      for (Index a = 0; a < nb; ++a) {
        double g = -basis[static_cast<std::size_t>(a)].trace().real();
        for (std::size_t i = 0; i < n; ++i) {
          g += mu * sbs[i][static_cast<std::size_t>(a)].trace().real();
        }
        grad(a) = g;
        for (Index b = a; b < nb; ++b) {
          double h = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            h += mu * trace_product(sbs[i][static_cast<std::size_t>(a)],
                                    sbs[i][static_cast<std::size_t>(b)]);
          }
          hess(a, b) = hess(b, a) = h;
        }
      }
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-14 * mu)) break;
      ComplexMatrix dk = ComplexMatrix::Zero(d, d);
      for (Index a = 0; a < nb; ++a) dk += step(a) * basis[static_cast<std::size_t>(a)];
      const double f0 = objective(k, mu);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        const ComplexMatrix trial = k + t * dk;
        if (slack_inverses(trial) &&
            objective(trial, mu) <= f0 - 0.25 * t * decrement) {
          k = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    const auto inv = slack_inverses(k);
    if (!inv) return best;
    BarrierCandidate c;
    c.m.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.m[i] = mu * hermitian_part((*inv)[i]);
    c.m = repair_povm(std::move(c.m));
    c.value = exclusion_value(r, c.m);
    c.k = hermitian_part(k);
    const ComplexMatrix alt = exclusion_dual(r, c.m);
    if (alt.trace().real() > c.k.trace().real()) c.k = alt;
    c.gap = c.value - c.k.trace().real();
    if (c.gap < best.gap) best = std::move(c);
    if (best.gap <= cert_tol || mu <= mu_final) break;
  }
  return best;
}

}  // namespace

ExclusionResult exclusion_solve(const Ensemble& ensemble,
                                const ExclusionOptions& options) {
  const std::size_t n = ensemble.size();
  const Index d = ensemble.dim();
  ExclusionResult res;
  std::vector<ComplexMatrix> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = ensemble.weighted(i);
  if (n == 1) {
    res.value = 1.0;
    res.povm = Povm::assume_valid({identity(d)});
    res.dual_k = r[0];
    res.gap = 0.0;
    res.converged = true;
    res.method = "trivial";
    return res;
  }

  // Exchange: min sum tr[M_i R_i] = c d - max sum tr[M_i (c I - R_i)].
  double c = 0.0;
  for (const auto& ri : r) c = std::max(c, max_eigenvalue(ri));
  std::vector<double> q_bar(n);
  std::vector<DensityMatrix> rho_bar;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix rb = c * identity(d) - r[i];
    q_bar[i] = rb.trace().real();
    total += q_bar[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix rb = c * identity(d) - r[i];
    if (q_bar[i] > 1e-14) {
      rho_bar.push_back(DensityMatrix::assume_valid(
          hermitian_part(rb / q_bar[i])));
    } else {
      rho_bar.push_back(DensityMatrix::assume_valid(identity(d) /
                                                    static_cast<double>(d)));
      q_bar[i] = 0.0;
    }
  }
  for (auto& q : q_bar) q /= total;

  std::vector<ComplexMatrix> best_m;
  std::optional<ComplexMatrix> best_k;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_value = 1.0;
  try {
    const Ensemble exchanged(q_bar, rho_bar);
    FixedPointOptions fp;
    fp.max_iter = options.max_iter;
    fp.cert_tol = options.cert_tol / std::max(total, 1.0);
    const DiscriminationResult s = solve_fixed_point(exchanged, fp);
    best_m = repair_povm(s.povm.elements());
    best_value = exclusion_value(r, best_m);
    best_gap = best_value - exclusion_dual(r, best_m).trace().real();
    res.method = "exchange-fixed-point";
  } catch (const Error&) {
    // Degenerate exchanged ensemble; the gradient method below handles it.
  }

  if (!(best_gap <= options.cert_tol)) {
    BarrierCandidate cand = barrier_exclusion(r, options.cert_tol);
    if (cand.gap < best_gap) {
      best_gap = cand.gap;
      best_value = cand.value;
      best_m = std::move(cand.m);
      best_k = std::move(cand.k);
      res.method = "barrier-newton";
    }
  }

  if (!(best_gap <= options.cert_tol)) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < options.starts; ++s) {
      std::vector<ComplexMatrix> start(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (s == 0) {
          start[i] = identity(d) / static_cast<double>(n);
        } else {
          ComplexMatrix g(d, d);
          for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
              g(a, b) = Complex(gauss(rng), gauss(rng));
            }
          }
          start[i] = g * g.adjoint();
        }
      }
      start = repair_povm(std::move(start));
      PgCandidate cand = projected_gradient(r, std::move(start),
                                            options.pg_iterations,
                                            options.cert_tol);
      if (cand.gap < best_gap) {
        best_gap = cand.gap;
        best_value = cand.value;
        best_m = std::move(cand.m);
        best_k.reset();
        res.method = "projected-gradient";
      }
      if (best_gap <= options.cert_tol) break;
    }
  }

  res.value = best_value;
  res.povm = Povm::assume_valid(best_m);
  res.dual_k = best_k ? *best_k : exclusion_dual(r, best_m);
  res.gap = std::max(0.0, best_gap);
  res.converged = best_gap <= options.cert_tol;
  res.perfect = res.value <= 1e-6;
  return res;
}

Ensemble pbr_ensemble(double theta, int n, std::size_t cap) {
  if (!(theta > 0.0 && theta <= kPi / 2 + 1e-12)) {
    throw Error(ErrorCode::kOutOfRange, "theta must lie in (0, pi/2]");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (n >= 31 || (std::size_t{1} << n) > cap) {
    throw Error(ErrorCode::kDimensionCapExceeded,
                "2^n exceeds the dimension cap");
  }
  ComplexVector k0(2), k1(2);
  k0 << std::cos(theta / 2), std::sin(theta / 2);
  k1 << std::cos(theta / 2), -std::sin(theta / 2);
  const std::size_t count = std::size_t{1} << n;
  std::vector<DensityMatrix> states;
  states.reserve(count);
  for (std::size_t x = 0; x < count; ++x) {
    ComplexVector ket = ComplexVector::Ones(1);
    for (int j = n - 1; j >= 0; --j) {
      ket = kron(ket, ((x >> j) & 1U) ? k1 : k0);
    }
    states.push_back(DensityMatrix::from_ket(ket));
  }
  return Ensemble(std::move(states));
}

// ---------------------------------------------------------------------------
// Unitary discrimination

namespace {

void check_unitary(const ComplexMatrix& u, const char* name) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw Error(ErrorCode::kNotUnitary, std::string(name) + " is not square");
  }
  if (max_abs_entry(u.adjoint() * u - identity(u.rows())) > 1e-8) {
    throw Error(ErrorCode::kNotUnitary, std::string(name) + " is not unitary");
  }
}

// Largest angular gap between consecutive sorted phases, and the indices of
// the eigenvalues bounding it (first is the counter-clockwise end).
struct ArcInfo {
  double max_gap = 0.0;
  std::size_t lo = 0;  // eigenvalue after the gap (start of the arc)
  std::size_t hi = 0;  // eigenvalue before the gap (end of the arc)
};

ArcInfo arc_info(const std::vector<double>& phases) {
  std::vector<std::size_t> order(phases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return phases[a] < phases[b]; });
  ArcInfo info;
  const std::size_t n = order.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = order[k];
    const std::size_t b = order[(k + 1) % n];
    double gap = phases[b] - phases[a];
    if (k + 1 == n) gap += 2 * kPi;
    if (gap > info.max_gap) {
      info.max_gap = gap;
      info.hi = a;
      info.lo = b;
    }
  }
  return info;
}

double wrap_phase(double x) {
  x = std::fmod(x, 2 * kPi);
  if (x < 0) x += 2 * kPi;
  return x;
}

constexpr double kHullTol = 1e-9;

}  // namespace

UnitaryReport unitary_distinguishability(const ComplexMatrix& u1,
                                         const ComplexMatrix& u2,
                                         bool use_ancilla,
                                         std::uint64_t seed) {
  check_unitary(u1, "U1");
  check_unitary(u2, "U2");
  if (u1.rows() != u2.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "unitaries differ in size");
  }
  const Index d = u1.rows();
  const ComplexMatrix w = u1.adjoint() * u2;
  // W is normal, so its complex Schur form is diagonal with an orthonormal
  // eigenbasis.
  Eigen::ComplexSchur<ComplexMatrix> schur(w);
  const ComplexMatrix& basis = schur.matrixU();
  std::vector<double> phases(d);
  std::vector<Complex> lambdas(d);
  for (Index k = 0; k < d; ++k) {
    lambdas[k] = schur.matrixT()(k, k);
    phases[k] = wrap_phase(std::arg(lambdas[k]));
  }
  const ArcInfo arc = arc_info(phases);

  UnitaryReport rep;
  rep.ancilla = use_ancilla;
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(d);
  if (arc.max_gap <= kPi + kHullTol || d == 1) {
    if (d == 1 || arc.max_gap > kPi + kHullTol) {
      weights(0) = 1.0;
    } else {
      // Convex weights with sum_k p_k lambda_k = 0.
      const double big = 1e3;
      Eigen::MatrixXd a(3, d);
      Eigen::VectorXd b(3);
      for (Index k = 0; k < d; ++k) {
        a(0, k) = lambdas[k].real();
        a(1, k) = lambdas[k].imag();
        a(2, k) = big;
      }
      b << 0.0, 0.0, big;
      weights = nnls(a, b).x;
      weights /= weights.sum();
    }
  } else {
    weights(static_cast<Index>(arc.lo)) = 0.5;
    weights(static_cast<Index>(arc.hi)) = 0.5;
  }
  Complex centre(0.0, 0.0);
  for (Index k = 0; k < d; ++k) centre += weights(k) * lambdas[k];
  if (d == 1) {
    rep.hull_distance = 1.0;
  } else if (arc.max_gap <= kPi + kHullTol) {
    rep.hull_distance = 0.0;
  } else {
    rep.hull_distance = std::cos((2 * kPi - arc.max_gap) / 2);
  }
  const double u_hull =
      2.0 * std::sqrt(std::max(0.0, 1.0 - rep.hull_distance * rep.hull_distance));

  const auto distance_for = [&](const ComplexVector& phi,
                                const ComplexMatrix& op) {
    const double ov = std::abs(phi.dot(op * phi)) / phi.squaredNorm();
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - ov * ov));
  };

  double u_analytic = 0.0;
  if (use_ancilla) {
    ComplexVector psi = ComplexVector::Zero(d * d);
    for (Index k = 0; k < d; ++k) {
      psi += std::sqrt(weights(k)) * kron(ComplexVector(basis.col(k)),
                                          basis_ket(d, k));
    }
    psi.normalize();
    rep.optimal_input = psi;
    u_analytic = distance_for(psi, kron(w, identity(d)));
    rep.u_search = u_analytic;
  } else {
    ComplexVector phi = ComplexVector::Zero(d);
    for (Index k = 0; k < d; ++k) {
      phi += std::sqrt(weights(k)) * basis.col(k);
    }
    phi.normalize();
    rep.optimal_input = phi;
    u_analytic = distance_for(phi, w);
    // Independent search over pure inputs; the analytic input above is the
    // certified candidate, the search only guards against a wrong hull.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const auto objective = [&](const Eigen::VectorXd& x) {
      ComplexVector v(d);
      for (Index k = 0; k < d; ++k) v(k) = Complex(x(2 * k), x(2 * k + 1));
      const double nrm = v.squaredNorm();
      if (nrm < 1e-300) return 1.0;
      return std::norm(v.dot(w * v)) / (nrm * nrm);
    };
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 64; ++s) {
      Eigen::VectorXd x0(2 * d);
      for (Index k = 0; k < 2 * d; ++k) x0(k) = gauss(rng);
      const VectorMinimum m = nelder_mead_minimize(objective, x0, 0.5, 4000,
                                                   1e-12);
      best = std::min(best, m.value);
    }
    rep.u_search = 2.0 * std::sqrt(std::max(0.0, 1.0 - best));
  }
  const double found = std::max(u_analytic, rep.u_search);
  rep.certified = std::abs(u_analytic - u_hull) <= 1e-9;
  rep.u = rep.certified ? u_hull : found;
  rep.perfect = rep.u >= 2.0 - 1e-9;
  rep.p_guess = 0.5 * (1.0 + rep.u / 2.0);
  return rep;
}

int unitary_repetition_n(const ComplexMatrix& u1, const ComplexMatrix& u2,
                         int n_cap) {
  check_unitary(u1, "U1");
  check_unitary(u2, "U2");
  if (u1.rows() != u2.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "unitaries differ in size");
  }
  const ComplexMatrix w = u1.adjoint() * u2;
  Eigen::ComplexSchur<ComplexMatrix> schur(w);
  const Index d = w.rows();
  std::vector<double> base(d);
  for (Index k = 0; k < d; ++k) base[k] = std::arg(schur.matrixT()(k, k));
  if (d >= 2) {
    std::vector<double> phases(d);
    for (int n = 1; n <= n_cap; ++n) {
      for (Index k = 0; k < d; ++k) phases[k] = wrap_phase(n * base[k]);
      if (arc_info(phases).max_gap <= kPi + kHullTol) return n;
    }
  }
  throw Error(ErrorCode::kNotFound,
              "no repetition count up to " + std::to_string(n_cap) +
                  " makes the unitaries perfectly distinguishable");
}

// ---------------------------------------------------------------------------
// Information measures

double mutual_information(const Ensemble& ensemble, const Povm& povm) {
  const Eigen::MatrixXd cond = outcome_distribution(ensemble, povm);
  const std::size_t n = ensemble.size();
  const Index m = cond.cols();
  Eigen::VectorXd pk = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < n; ++i) {
    pk += ensemble.prior(i) * cond.row(static_cast<Index>(i)).transpose();
  }
  double info = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (Index k = 0; k < m; ++k) {
      const double joint = ensemble.prior(i) * cond(static_cast<Index>(i), k);
      if (joint <= 0.0 || pk(k) <= 0.0) continue;
      info += joint * std::log2(cond(static_cast<Index>(i), k) / pk(k));
    }
  }
  return std::max(0.0, info);
}

double holevo_chi(const Ensemble& ensemble) {
  double chi = von_neumann_entropy(
      DensityMatrix::assume_valid(hermitian_part(ensemble.average())));
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    chi -= ensemble.prior(i) * von_neumann_entropy(ensemble.state(i));
  }
  return std::max(0.0, chi);
}

}  // namespace qsd
