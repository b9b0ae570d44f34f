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

#ifndef QOPTICS_ENTANGLEMENT_HPP
#define QOPTICS_ENTANGLEMENT_HPP

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "qoptics/fockcore.hpp"

namespace qoptics {

struct Schmidt {
  std::vector<double> coefficients;  // descending
  Eigen::MatrixXcd basis1;           // columns
  Eigen::MatrixXcd basis2;
};

/// psi on C^{d1} (x) C^{d2}, component index i*d2 + j.
inline Schmidt schmidt(const Eigen::VectorXcd& psi, int d1, int d2) {
  if (psi.size() != Eigen::Index(d1) * d2) throw std::invalid_argument("dimension mismatch");
  Eigen::MatrixXcd M(d1, d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) M(i, j) = psi(i * d2 + j);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Schmidt s;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) s.coefficients.push_back(svd.singularValues()(k));
  s.basis1 = svd.matrixU();
  s.basis2 = svd.matrixV().conjugate();
  return s;
}

inline Eigen::VectorXcd schmidt_reconstruct(const Schmidt& s) {
  const auto d1 = s.basis1.rows(), d2 = s.basis2.rows();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d1 * d2);
  for (std::size_t k = 0; k < s.coefficients.size(); ++k)
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index j = 0; j < d2; ++j)
        psi(i * d2 + j) += s.coefficients[k] * s.basis1(i, Eigen::Index(k)) * s.basis2(j, Eigen::Index(k));
  return psi;
}

/// Dense form of a Fock state split into two mode groups. Each side's basis is
/// the sorted set of sub-occupations that actually occur.
struct BipartiteDense {
  Eigen::VectorXcd psi;
  std::vector<Occupation> basis1, basis2;
};

inline BipartiteDense to_bipartite(const OccupationState& s, const std::vector<ModeLabel>& side2) {
  std::vector<bool> two(s.reg().size(), false);
  for (auto i : indices_of(s.reg(), side2)) two[i] = true;
  std::map<Occupation, int> b1, b2;
  std::vector<std::tuple<Occupation, Occupation, cplx>> parts;
  for (const auto& [n, a] : s.terms()) {
    Occupation o1, o2;
    for (std::size_t i = 0; i < n.size(); ++i) (two[i] ? o2 : o1).push_back(n[i]);
    b1.emplace(o1, 0);
    b2.emplace(o2, 0);
    parts.emplace_back(o1, o2, a);
  }
  BipartiteDense d;
  int k = 0;
  for (auto& [o, i] : b1) {
    i = k++;
    d.basis1.push_back(o);
  }
  k = 0;
  for (auto& [o, i] : b2) {
    i = k++;
    d.basis2.push_back(o);
  }
  d.psi = Eigen::VectorXcd::Zero(Eigen::Index(b1.size() * b2.size()));
  for (const auto& [o1, o2, a] : parts) d.psi(b1[o1] * Eigen::Index(b2.size()) + b2[o2]) += a;
  return d;
}

inline Schmidt schmidt(const OccupationState& s, const std::vector<ModeLabel>& side2) {
  auto d = to_bipartite(s, side2);
  return schmidt(d.psi / d.psi.norm(), int(d.basis1.size()), int(d.basis2.size()));
}

/// Exchange the subsystem-2 occupations of every ket and bra.
inline DensityOperator partial_transpose(const DensityOperator& rho, const std::vector<ModeLabel>& side2) {
  auto idx = indices_of(rho.reg(), side2);
  DensityOperator out(rho.reg(), rho.cutoff());
  for (const auto& [k, v] : rho.entries()) {
    Occupation a = k.first, b = k.second;
    for (auto i : idx) std::swap(a[i], b[i]);
    out.add(a, b, v);
  }
  return out;
}

/// Dense partial transpose on C^{d1} (x) C^{d2}.
inline Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho, int d1, int d2) {
  Eigen::MatrixXcd out(rho.rows(), rho.cols());
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      for (int k = 0; k < d1; ++k)
        for (int l = 0; l < d2; ++l) out(i * d2 + j, k * d2 + l) = rho(i * d2 + l, k * d2 + j);
  return out;
}

struct PptVerdict {
  bool ppt;
  double min_eigenvalue;
};

/// Negative partial-transpose eigenvalue below -tol means entangled. A
/// positive partial transpose proves separability only for 2x2 and 2x3.
inline PptVerdict is_ppt(const DensityOperator& rho, const std::vector<ModeLabel>& side2, double tol = 1e-10) {
  auto ev = partial_transpose(rho, side2).eigenvalues();
  double m = ev.empty() ? 0.0 : ev.front();
  return {m >= -tol, m};
}

inline PptVerdict is_ppt(const Eigen::MatrixXcd& rho, int d1, int d2, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(partial_transpose(rho, d1, d2), Eigen::EigenvaluesOnly);
  double m = es.eigenvalues().minCoeff();
  return {m >= -tol, m};
}

inline Eigen::VectorXcd singlet_vector() {
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(4);
  s(1) = 1 / std::sqrt(2.0);
  s(2) = -1 / std::sqrt(2.0);
  return s;
}

/// eps |Psi-><Psi-| + (1-eps) 1/4 in the basis |00>,|01>,|10>,|11>.
struct WernerState {
  double eps = 1.0;

  Eigen::MatrixXcd matrix() const {
    if (eps < 0 || eps > 1) throw std::invalid_argument("eps must lie in [0,1]");
    auto s = singlet_vector();
    return eps * s * s.adjoint() + (1 - eps) * Eigen::MatrixXcd::Identity(4, 4) / 4.0;
  }
};

struct PurificationRound {
  double F;
  double F_prime;
};

inline PurificationRound purification_step(const WernerState& w) {
  if (w.eps < 0 || w.eps > 1) throw std::invalid_argument("eps must lie in [0,1]");
  const double e = w.eps;
  return {(1 + 3 * e) / 4, (1 + 2 * e + 5 * e * e) / (4 * (1 + e))};
}

/// Local unitary U with (U (x) 1)|psi'> = |psi> up to a global phase, both
/// maximally entangled on C^d (x) C^d.
inline Eigen::MatrixXcd equivalize_max_entangled(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& psi_prime,
                                                 int d, double tol = 1e-8) {
  auto flat = [&](const Eigen::VectorXcd& v) {
    auto s = schmidt(v / v.norm(), d, d);
    for (double c : s.coefficients)
      if (std::abs(c - 1 / std::sqrt(double(d))) > tol) return false;
    return true;
  };
  if (!flat(psi) || !flat(psi_prime)) throw std::invalid_argument("inputs must be maximally entangled");
  auto mat = [&](const Eigen::VectorXcd& v) {
    Eigen::MatrixXcd M(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M(i, j) = v(i * d + j);
    return Eigen::MatrixXcd(M / v.norm());
  };
  // psi = sum M_ij |i>|j>, (U (x) 1) acts as U M; M' is sqrt(1/d) times unitary.
  Eigen::MatrixXcd M = mat(psi), Mp = mat(psi_prime);
  Eigen::MatrixXcd U = double(d) * M * Mp.adjoint();
  // Phase quotient: largest overlap component made real positive.
  Eigen::MatrixXcd UM = U * Mp;
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < M.size(); ++i)
    if (std::abs(M.data()[i]) > std::abs(M.data()[best])) best = i;
  cplx ph = UM.data()[best] / M.data()[best];
  return U / (ph / std::abs(ph));
}

struct SingletProjectorTable {
  double Pa_prime, Pb_prime, PaPb, PaPb_prime, Pa_primePb, Pa_primePb_prime;
  double combination;  // <P_a' + P_b' - P_a'P_b' - P_a'P_b - P_aP_b' + P_aP_b>
};

/// Single-photon state (|0>_a|1>_b - |1>_a|0>_b)/sqrt2 with P_a = |1><1|_a and
/// P_a' along (|1> + sqrt3|0>)/2, P_b' along (|1> - sqrt3|0>)/2.
inline SingletProjectorTable singlet_projector_values() {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);  // index na*2 + nb
  psi(0 * 2 + 1) = 1 / std::sqrt(2.0);
  psi(1 * 2 + 0) = -1 / std::sqrt(2.0);
  auto proj = [](double c0, double c1) {
    Eigen::Vector2cd v(c0, c1);
    return Eigen::Matrix2cd(v * v.adjoint());
  };
  Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd Pa = proj(0, 1), Pb = Pa;
  Eigen::Matrix2cd Pap = proj(std::sqrt(3.0) / 2, 0.5), Pbp = proj(-std::sqrt(3.0) / 2, 0.5);
  auto kron = [](const Eigen::Matrix2cd& A, const Eigen::Matrix2cd& B) {
    Eigen::Matrix4cd K;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) K.block<2, 2>(2 * i, 2 * j) = A(i, j) * B;
    return K;
  };
  auto ev = [&](const Eigen::Matrix4cd& O) { return (psi.adjoint() * O * psi)(0, 0).real(); };
  SingletProjectorTable t{};
  t.Pa_prime = ev(kron(Pap, I));
  t.Pb_prime = ev(kron(I, Pbp));
  t.PaPb = ev(kron(Pa, Pb));
  t.PaPb_prime = ev(kron(Pa, Pbp));
  t.Pa_primePb = ev(kron(Pap, Pb));
  t.Pa_primePb_prime = ev(kron(Pap, Pbp));
  t.combination = t.Pa_prime + t.Pb_prime - t.Pa_primePb_prime - t.Pa_primePb - t.PaPb_prime + t.PaPb;
  return t;
}

}  // namespace qoptics

#endif  // QOPTICS_ENTANGLEMENT_HPP
