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

#ifndef QOPTICS_GAUSSIAN_HPP
#define QOPTICS_GAUSSIAN_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "qoptics/fockcore.hpp"

namespace qoptics {

struct Su11Ordered {
  cplx t_plus;
  double t_zero;
  cplx t_minus;
};

/// exp(tau L+ - tau* L-) = exp(t_plus L+) exp(t_zero L0) exp(t_minus L-).
inline Su11Ordered normal_order_su11(cplx tau) {
  double r = std::abs(tau);
  if (r == 0) return {0.0, 0.0, 0.0};
  cplx ph = tau / r;
  double t = std::tanh(r);
  return {ph * t, -2.0 * std::log(std::cosh(r)), -std::conj(ph) * t};
}

struct PdcCoupling {
  cplx tau;
  cplx xi;
  double r;
  double q;

  static PdcCoupling from_tau(cplx tau) {
    double a = std::abs(tau);
    double r = std::tanh(a);
    cplx xi = a == 0 ? cplx{} : r * tau / a;
    return {tau, xi, r, 2.0 * std::log(std::cosh(a))};
  }

  /// Single-pair probability p = 2 tanh^2|tau|.
  double pair_probability() const { return 2 * r * r; }
};

/// exp(sign * 1/2 (a^dag, B a^dag)) |0>. sign = -1 is the default source
/// convention; +1 matches sources written with exp(+xi/2 ...).
struct GaussianSource {
  Eigen::MatrixXcd B;
  int order = 0;
  double sign = -1.0;

  void validate() const {
    if (B.rows() != B.cols()) throw std::invalid_argument("B must be square");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > kUnitaryTol)
      throw std::invalid_argument("B must be symmetric");
    if (order < 0) throw std::invalid_argument("negative order");
  }
};

/// sum_ij B_ij a_i^dag a_j^dag applied to s.
inline OccupationState apply_bilinear(const OccupationState& s, const Eigen::MatrixXcd& B) {
  const auto d = std::size_t(B.rows());
  OccupationState out(s.reg(), s.cutoff());
  if (s.truncated()) out.mark_truncated();
  for (std::size_t j = 0; j < d; ++j) {
    auto sj = apply_creation(s, j);
    if (sj.truncated()) out.mark_truncated();
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(B(i, j)) < kPruneTol) continue;
      auto t = apply_creation(sj, i);
      if (t.truncated()) out.mark_truncated();
      t *= B(i, j);
      out += t;
    }
  }
  return out;
}

/// Pair-order resolved expansion: element k is (sign/2 (a,Ba))^k/k! |0>.
inline std::vector<OccupationState> expand_squeezed_vacuum_by_order(const GaussianSource& src,
                                                                   const Register& reg, int cutoff) {
  src.validate();
  if (Eigen::Index(reg.size()) != src.B.rows()) throw std::invalid_argument("register size mismatch");
  if (2 * src.order > cutoff) throw std::invalid_argument("cutoff too small for the requested order");
  std::vector<OccupationState> terms{OccupationState::vacuum(reg, cutoff)};
  for (int k = 1; k <= src.order; ++k) {
    auto t = apply_bilinear(terms.back(), src.B);
    t *= src.sign * 0.5 / k;
    terms.push_back(std::move(t));
  }
  return terms;
}

inline OccupationState expand_squeezed_vacuum(const GaussianSource& src, const Register& reg, int cutoff) {
  auto terms = expand_squeezed_vacuum_by_order(src, reg, cutoff);
  OccupationState out(reg, cutoff);
  for (const auto& t : terms) out += t;
  return out;
}

/// Two spatial modes with polarisation, register (a_x, a_y, b_x, b_y).
inline Register pdc_register() { return Register::polarized(2); }

/// L+ = a_x^dag b_y^dag - a_y^dag b_x^dag on the given four mode indices.
inline OccupationState apply_lplus(const OccupationState& s, std::size_t ax, std::size_t ay,
                                   std::size_t bx, std::size_t by) {
  auto t1 = apply_creation(apply_creation(s, by), ax);
  auto t2 = apply_creation(apply_creation(s, bx), ay);
  t2 *= -1.0;
  return t1 + t2;
}

/// Normalised n-pair state N_n L+^n |0>, N_n^2 = 1/(n!(n+1)!).
inline OccupationState pdc_pair_state(int n, int cutoff) {
  if (n < 0) throw std::invalid_argument("negative pair number");
  if (2 * n > cutoff) throw std::invalid_argument("cutoff too small");
  auto s = OccupationState::vacuum(pdc_register(), cutoff);
  for (int k = 0; k < n; ++k) s = apply_lplus(s, 0, 1, 2, 3);
  s *= 1.0 / std::sqrt(factorial(n) * factorial(n + 1));
  return s;
}

/// B matrix of the two-mode polarisation-entangled source exp(xi L+)|0>.
inline Eigen::MatrixXcd pdc_b_matrix(cplx xi) {
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(4, 4);
  B(0, 3) = B(3, 0) = -xi;
  B(1, 2) = B(2, 1) = xi;
  return B;
}

/// Takagi factorisation B = U diag(lambda) U^T with lambda >= 0 descending.
struct SqueezeSpectrum {
  Eigen::VectorXd lambda;
  Eigen::MatrixXcd U;
};

inline SqueezeSpectrum takagi(const Eigen::MatrixXcd& B, double tol = 1e-10) {
  const Eigen::Index n = B.rows();
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > kUnitaryTol)
    throw std::invalid_argument("B must be symmetric");
  // Real doubling: [[X, Y], [Y, -X]] (u; v) = s (u; v)  <=>  B conj(z) = s z, z = u + i v.
  Eigen::MatrixXd M(2 * n, 2 * n);
  M << B.real(), B.imag(), B.imag(), -B.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<double> sv;
  std::vector<Eigen::VectorXcd> vecs;
  for (Eigen::Index k = 2 * n - 1; k >= 0 && Eigen::Index(sv.size()) < n; --k) {
    double s = es.eigenvalues()(k);
    if (s <= tol * scale) break;
    Eigen::VectorXd e = es.eigenvectors().col(k);
    Eigen::VectorXcd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = cplx(e(i), e(i + n));
    z.normalize();
    sv.push_back(s);
    vecs.push_back(z);
  }
  const auto r = Eigen::Index(vecs.size());
  Eigen::MatrixXcd U(n, n);
  for (Eigen::Index k = 0; k < r; ++k) U.col(k) = vecs[std::size_t(k)];
  if (r < n) {
    // Kernel part: any orthonormal completion works since B conj(z) = 0 there.
    Eigen::MatrixXcd ext(n, r + n);
    ext.leftCols(r) = U.leftCols(r);
    ext.rightCols(n) = Eigen::MatrixXcd::Identity(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ext);
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    U.rightCols(n - r) = Q.rightCols(n - r);
  }
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < r; ++k) lam(k) = sv[std::size_t(k)];
  return {lam, U};
}

inline Eigen::MatrixXcd symmetric_nport(int N) {
  if (N < 1) throw std::invalid_argument("N-port needs N >= 1");
  Eigen::MatrixXcd U(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      U(j, k) = std::polar(1.0 / std::sqrt(double(N)), 2 * std::numbers::pi * j * k / N);
  return U;
}

/// 2N-port for a cascade of lossy detectors; modes 0..N-1 reach detectors,
/// N..2N-1 are loss modes.
inline Eigen::MatrixXcd cascade_unitary(int N, double eta) {
  if (eta < 0 || eta > 1) throw std::invalid_argument("eta must lie in [0,1]");
  Eigen::MatrixXcd U = symmetric_nport(N);
  double et = std::sqrt(1 - eta * eta);
  Eigen::MatrixXcd V(2 * N, 2 * N);
  V << eta * U, et * U, -et * U, eta * U;
  return V;
}

/// [[cos t, sin t], [sin t, -cos t]]: a_1^dag -> cos a_1^dag + sin a_2^dag,
/// a_2^dag -> sin a_1^dag - cos a_2^dag.
inline Eigen::MatrixXcd beam_splitter(double theta) {
  Eigen::MatrixXcd U(2, 2);
  U << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  return U;
}

inline Eigen::MatrixXcd polarization_rotation(double theta) { return beam_splitter(theta); }

inline Eigen::MatrixXcd phase_shift(double phi) {
  Eigen::MatrixXcd U(1, 1);
  U(0, 0) = std::polar(1.0, phi);
  return U;
}

/// Symmetric 8x8 source matrix of the polarisation teleportation set-up,
/// modes (a_x, a_y, b_x, b_y, c_x, c_y, d_x, d_y).
inline Eigen::MatrixXcd innsbruck_a_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(8, 8);
  A(0, 2) = -s; A(0, 3) = c; A(0, 4) = -s; A(0, 5) = c;
  A(1, 2) = c;  A(1, 3) = s; A(1, 4) = c;  A(1, 5) = s;
  A(2, 7) = -1;
  A(3, 6) = -1;
  A(4, 7) = 1;
  A(5, 6) = 1;
  Eigen::MatrixXd S = (A + A.transpose()) / std::sqrt(2.0);
  return S.cast<cplx>();
}

/// exp(xi/2 (a^dag, A a^dag))|0> through `order` powers of the bilinear.
inline OccupationState innsbruck_prior_state(double theta, double xi, int order, int cutoff = 8) {
  GaussianSource src{xi * innsbruck_a_matrix(theta), order, +1.0};
  return expand_squeezed_vacuum(src, Register::polarized(4), cutoff);
}

/// Bob's (d_x, d_y) amplitudes after a_x (b_x c_y - b_y c_x) and projecting the
/// other six modes on vacuum. Only the one-photon components are returned.
inline std::pair<cplx, cplx> innsbruck_teleported_amplitudes(double theta, double xi) {
  auto s = innsbruck_prior_state(theta, xi, 2);
  auto t1 = apply_annihilation(apply_annihilation(s, 5), 2);
  auto t2 = apply_annihilation(apply_annihilation(s, 4), 3);
  t2 *= -1.0;
  auto t = apply_annihilation(t1 + t2, 0);
  return {t.amplitude({0, 0, 0, 0, 0, 0, 1, 0}), t.amplitude({0, 0, 0, 0, 0, 0, 0, 1})};
}

}  // namespace qoptics

#endif  // QOPTICS_GAUSSIAN_HPP
