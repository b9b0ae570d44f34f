/*
 * Copyright 2026 The qoptics Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QOPTICS_METROLOGY_HPP
#define QOPTICS_METROLOGY_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "qoptics/fockcore.hpp"

namespace qoptics {

/// Schmidt-form joint state sum_k c_k |a_k>|b_k> with a POVM element E acting
/// on the |a> side.
struct PreparationScenario {
  std::vector<cplx> c;
  std::vector<Eigen::VectorXcd> a;
  Eigen::MatrixXcd E;
  std::size_t k = 0;
};

inline double confidence(const PreparationScenario& s) {
  if (s.c.size() != s.a.size() || s.k >= s.c.size()) throw std::invalid_argument("malformed scenario");
  double num = 0, den = 0;
  for (std::size_t l = 0; l < s.c.size(); ++l) {
    double v = std::norm(s.c[l]) * (s.a[l].adjoint() * s.E * s.a[l])(0, 0).real();
    den += v;
    if (l == s.k) num = v;
  }
  if (!(den > 0)) throw std::domain_error("zero denominator in confidence");
  return num / den;
}

/// Single-click confidence of an N-cascade with delta = |gamma|^2/|beta|^2.
inline double confidence_cascade(int N, double eta2, double delta) {
  if (N < 1) throw std::invalid_argument("N >= 1 required");
  return N / (N + delta * (eta2 + 2.0 * N * (1 - eta2)));
}

/// N -> infinity limit of confidence_cascade.
inline double confidence_cascade_limit(double eta2, double delta) {
  return 1.0 / (1.0 + 2.0 * delta * (1 - eta2));
}

/// Efficiency at which a monotone increasing confidence curve crosses C.
/// Returns NaN when the curve never reaches C on [0,1].
template <class F>
double efficiency_for_confidence(F curve, double C) {
  double lo = 0, hi = 1;
  if (curve(hi) < C) return std::numeric_limits<double>::quiet_NaN();
  if (curve(lo) >= C) return 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (curve(mid) < C ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// C_m = <a_k|F(rho)|a_k> / Tr F(rho), F(rho) = sum A rho A^dag.
inline double confidence_measurement(const std::vector<Eigen::MatrixXcd>& family, const Eigen::MatrixXcd& rho,
                                     const Eigen::VectorXcd& ak) {
  if (family.empty()) throw std::invalid_argument("empty operator family");
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const auto& A : family) F += A * rho * A.adjoint();
  double tr = F.trace().real();
  if (!(tr > 0)) throw std::domain_error("zero trace");
  return (ak.adjoint() * F * ak)(0, 0).real() / tr;
}

/// <phi|rho|phi> / (Tr rho <phi|phi>).
inline double fidelity(const DensityOperator& rho, const OccupationState& phi) {
  if (!(rho.reg() == phi.reg())) throw std::invalid_argument("register mismatch");
  cplx s{};
  for (const auto& [k, v] : rho.entries()) s += std::conj(phi.amplitude(k.first)) * v * phi.amplitude(k.second);
  return s.real() / (rho.trace().real() * phi.norm2());
}

using Distribution = std::vector<double>;

/// (n+1) r^{2n} e^{-2q}, r = tanh|tau|, q = 2 ln cosh|tau|.
inline Distribution pdc_distribution(double tau, int n_max) {
  double r = std::tanh(std::abs(tau)), q = 2 * std::log(std::cosh(std::abs(tau)));
  Distribution P;
  for (int n = 0; n <= n_max; ++n) P.push_back((n + 1) * std::pow(r, 2 * n) * std::exp(-2 * q));
  return P;
}

/// Small-coupling form (n+1)(p/2)^n e^{-p}.
inline Distribution pdc_distribution_small_p(double p, int n_max) {
  Distribution P;
  for (int n = 0; n <= n_max; ++n) P.push_back((n + 1) * std::pow(p / 2, n) * std::exp(-p));
  return P;
}

inline Distribution poisson(double mean, int n_max) {
  Distribution P;
  double t = std::exp(-mean);
  for (int n = 0; n <= n_max; ++n) {
    P.push_back(t);
    t *= mean / (n + 1);
  }
  return P;
}

inline double mean_of(const Distribution& P) {
  double m = 0;
  for (std::size_t n = 0; n < P.size(); ++n) m += double(n) * P[n];
  return m;
}

inline double statistical_distance(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw std::invalid_argument("support mismatch");
  double s = 0;
  for (std::size_t j = 0; j < p.size(); ++j) s += std::sqrt(p[j] * q[j]);
  return std::acos(std::min(1.0, s));
}

/// Line element sum_j (p_j - q_j)^2 / q_j with q as the base point.
inline double line_element(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw std::invalid_argument("support mismatch");
  double s = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (q[j] > 0) s += (p[j] - q[j]) * (p[j] - q[j]) / q[j];
  return s;
}

struct Distinguishability {
  double ds2;
  double n_required;
  double trials;
  bool distinguishable;
};

/// Pair statistics against a Poisson law of equal mean. The experiment runs
/// about 1/p^2 trials; it resolves the difference once that is within an
/// order of magnitude of 1/ds^2.
inline Distinguishability pdc_poisson_distinguishability(double p, int n_max = 30) {
  auto P = pdc_distribution_small_p(p, n_max);
  auto Q = poisson(mean_of(P), n_max);
  double ds2 = line_element(P, Q);
  double trials = 1 / (p * p);
  return {ds2, 1 / ds2, trials, (1 / ds2) / trials <= 10.0};
}

inline double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

inline double shannon_entropy(const Distribution& p) {
  double s = 0;
  for (double v : p) s -= xlog2x(v);
  return s;
}

inline double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s -= xlog2x(std::max(0.0, es.eigenvalues()(i)));
  return s;
}

inline double von_neumann_entropy(const DensityOperator& rho) {
  auto ev = rho.normalized().eigenvalues();
  double s = 0;
  for (double v : ev) s -= xlog2x(std::max(0.0, v));
  return s;
}

/// E(psi) = S(Tr_2 |psi><psi|) with subsystem 1 given by `side1`.
inline double entanglement_measure(const OccupationState& psi, const std::vector<ModeLabel>& side1) {
  return von_neumann_entropy(partial_trace(DensityOperator::pure(psi.normalized()), side1));
}

/// Dense bipartite version on C^{d1} (x) C^{d2}, index i*d2 + j.
inline double entanglement_measure(const Eigen::VectorXcd& psi, int d1, int d2) {
  Eigen::MatrixXcd M(d1, d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) M(i, j) = psi(i * d2 + j);
  M /= psi.norm();
  return von_neumann_entropy(Eigen::MatrixXcd(M * M.adjoint()));
}

}  // namespace qoptics

#endif  // QOPTICS_METROLOGY_HPP
