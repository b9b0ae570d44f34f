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

#ifndef QOPTICS_EXPERIMENTS_HPP
#define QOPTICS_EXPERIMENTS_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qoptics/detectors.hpp"
#include "qoptics/entanglement.hpp"
#include "qoptics/fockcore.hpp"
#include "qoptics/gaussian.hpp"
#include "qoptics/metrology.hpp"

namespace qoptics {

// ---------------------------------------------------------------------------
// Polarisation teleportation with two down-converters.
//
// Source 1 feeds Victor (a) and Alice (b), source 2 feeds Alice (c) and Bob (d).
// Alice mixes b and c on a 50:50 beam splitter and watches u and v with
// polarisation-insensitive detectors. Victor rotates a by theta and detects
// a_x with an N-cascade. Bob's modes (d_x, d_y) are left undetected.
// ---------------------------------------------------------------------------

enum class TeleportModel {
  cascade,           // single cascade click in a_x, no click in a_y
  ay_undetected,     // single detector in a_x, a_y traced out
};

struct InnsbruckConfig {
  double p1 = 1e-4;
  double p2 = 1e-4;
  double theta = 0.3;
  double phi = std::numbers::pi;
  int N = 1;
  double eta_u2 = 1.0;
  double eta_v2 = 1.0;
  double eta_c2 = 1.0;
  int order = 2;
  TeleportModel model = TeleportModel::cascade;

  void validate() const {
    auto prob = [](double p) { return p >= 0 && p < 1; };
    auto eff = [](double e) { return e >= 0 && e <= 1; };
    if (!prob(p1) || !prob(p2)) throw std::invalid_argument("pair probabilities must lie in [0,1)");
    if (!eff(eta_u2) || !eff(eta_v2) || !eff(eta_c2)) throw std::invalid_argument("efficiencies must lie in [0,1]");
    if (N < 1) throw std::invalid_argument("cascade needs N >= 1");
    if (order != 2 && order != 3) throw std::invalid_argument("order must be 2 or 3");
    if (model == TeleportModel::ay_undetected && N != 1)
      throw std::invalid_argument("the a_y-undetected model has no cascade");
  }

  double g_uvc() const { return eta_u2 * eta_v2 * eta_c2; }
};

/// Blocks of Bob's unnormalised state keyed by (power of p1, power of p2).
using OrderedBlocks = std::map<std::pair<int, int>, DensityOperator>;

inline Register bob_register() { return Register({{3, Pol::x}, {3, Pol::y}}); }

/// cos(theta)|0,1> + e^{i phi} sin(theta)|1,0> in (n_dx, n_dy).
inline OccupationState psi_theta(double theta, double phi, int cutoff = 6) {
  OccupationState s(bob_register(), cutoff);
  s.add({0, 1}, std::cos(theta));
  s.add({1, 0}, std::polar(1.0, phi) * std::sin(theta));
  return s;
}

inline OccupationState psi_theta_perp(double theta, double phi, int cutoff = 6) {
  OccupationState s(bob_register(), cutoff);
  s.add({0, 1}, std::polar(1.0, phi) * std::sin(theta));
  s.add({1, 0}, -std::cos(theta));
  return s;
}

struct ClosedForm {
  OrderedBlocks blocks;
  bool unverified_extrapolation = false;
};

namespace detail {

inline void add_block(OrderedBlocks& b, std::pair<int, int> key, const DensityOperator& r) {
  auto it = b.find(key);
  if (it == b.end())
    b.emplace(key, r);
  else
    it->second += r;
}

inline DensityOperator diag_block(const std::vector<std::pair<Occupation, double>>& d, int cutoff) {
  DensityOperator r(bob_register(), cutoff);
  for (const auto& [n, w] : d) r.add(n, n, w);
  return r;
}

}  // namespace detail

/// Reference expansions of Bob's state. Order 2 for the chosen model; order 3
/// adds the third-order blocks of the a_y-undetected, single-detector model.
inline ClosedForm innsbruck_closed_form(const InnsbruckConfig& cfg, int cutoff = 6) {
  cfg.validate();
  ClosedForm out;
  const double g = cfg.g_uvc(), ec = cfg.eta_c2, N = cfg.N;
  auto psi = DensityOperator::pure(psi_theta(cfg.theta, cfg.phi, cutoff));
  if (cfg.model == TeleportModel::cascade) {
    if (cfg.N > 4) out.unverified_extrapolation = true;
    double vac = g / 8 / N * (1 + (5 * N - 3) * (1 - ec));
    out.blocks.emplace(std::pair{2, 0}, detail::diag_block({{{0, 0}, vac}}, cutoff));
    out.blocks.emplace(std::pair{1, 1}, (g / 8) * psi);
    if (cfg.order == 3) throw std::invalid_argument("third-order closed form exists for the a_y-undetected model only");
    return out;
  }
  out.blocks.emplace(std::pair{2, 0}, detail::diag_block({{{0, 0}, g / 8 * (3 - ec)}}, cutoff));
  out.blocks.emplace(std::pair{1, 1}, (g / 8) * psi);
  if (cfg.order == 3) {
    const double pre = g / 8 * (4 - cfg.eta_u2 - cfg.eta_v2) / 16;
    out.blocks.emplace(std::pair{3, 0}, detail::diag_block({{{0, 0}, pre * 6 * (6 - 4 * ec + ec * ec)}}, cutoff));
    auto perp = DensityOperator::pure(psi_theta_perp(cfg.theta, cfg.phi, cutoff));
    auto rho1 = detail::diag_block({{{1, 0}, 0.5}, {{0, 1}, 0.5}}, cutoff);
    auto one = (pre * 2 * (2 - ec)) * (psi + perp) + (pre * 8 * (3 - ec)) * rho1;
    out.blocks.emplace(std::pair{2, 1}, one);
    const double c2 = std::cos(2 * cfg.theta), s2 = std::sin(2 * cfg.theta);
    DensityOperator rho2(bob_register(), cutoff);
    rho2.add({0, 2}, {0, 2}, (2 + c2) / 6);
    rho2.add({2, 0}, {2, 0}, (2 - c2) / 6);
    rho2.add({1, 1}, {1, 1}, 2.0 / 6);
    // Coherences carry one extra d_x photon on the ket side: factor e^{i phi}.
    const cplx off = std::sqrt(2.0) / 2 * s2 / 6 * std::polar(1.0, cfg.phi);
    rho2.add({2, 0}, {1, 1}, off);
    rho2.add({1, 1}, {2, 0}, std::conj(off));
    rho2.add({1, 1}, {0, 2}, off);
    rho2.add({0, 2}, {1, 1}, std::conj(off));
    out.blocks.emplace(std::pair{1, 2}, (pre * 12) * rho2);
  }
  return out;
}

struct TeleportSimulation {
  OrderedBlocks blocks;
  double cross_sector_max = 0;  // largest coherence between different Bob photon numbers
  double odd_power_max = 0;     // largest term with an odd power of a coupling
  bool truncated = false;
};

/// Fock-space pipeline: sources -> beam splitter -> rotation -> N-port ->
/// detector POVMs -> trace. Source amplitudes are xi^k/k! L+^k|0>; a term
/// xi1^{2a} xi2^{2b} is reported as p1^a p2^b / 2^{a+b} (p = 2 xi^2).
inline TeleportSimulation innsbruck_simulate(const InnsbruckConfig& cfg, int cutoff = 6) {
  cfg.validate();
  if (cutoff < 2 * cfg.order) throw std::invalid_argument("cutoff too small for the requested order");
  const int N = cfg.N;
  std::vector<ModeLabel> labels;
  for (int i = 0; i < N; ++i) labels.push_back({10 + i, Pol::x});
  labels.push_back({0, Pol::y});
  for (int sp = 1; sp <= 3; ++sp) {
    labels.push_back({sp, Pol::x});
    labels.push_back({sp, Pol::y});
  }
  const Register reg(labels);
  const std::size_t ax = 0, ay = std::size_t(N), bx = ay + 1, by = ay + 2, cx = ay + 3, cy = ay + 4;

  std::vector<std::size_t> cascade(static_cast<std::size_t>(N));
  std::iota(cascade.begin(), cascade.end(), 0);

  std::map<std::pair<int, int>, OccupationState> terms;
  std::vector<OccupationState> s1{OccupationState::vacuum(reg, cutoff)};
  for (int k = 1; k <= cfg.order; ++k) s1.push_back(apply_lplus(s1.back(), ax, ay, bx, by));
  for (int k1 = 0; k1 <= cfg.order; ++k1) {
    auto st = s1[std::size_t(k1)];
    for (int k2 = 0; k1 + k2 <= cfg.order; ++k2) {
      if (k2 > 0) st = apply_lplus(st, cx, cy, bx + 4, bx + 5);
      auto t = st;
      t *= 1.0 / (factorial(k1) * factorial(k2));
      t = apply_passive_unitary(t, {bx, cx}, beam_splitter(std::numbers::pi / 4));
      t = apply_passive_unitary(t, {by, cy}, beam_splitter(std::numbers::pi / 4));
      // Phase plate on a_y; phi = pi is the bare set-up.
      if (cfg.phi != std::numbers::pi)
        t = apply_passive_unitary(t, std::vector<std::size_t>{ay}, phase_shift(cfg.phi - std::numbers::pi));
      t = apply_passive_unitary(t, {ax, ay}, polarization_rotation(cfg.theta));
      if (N > 1) t = apply_passive_unitary(t, cascade, symmetric_nport(N));
      terms.emplace(std::pair{k1, k2}, std::move(t));
    }
  }

  std::vector<PovmElement> outcome{
      povm_single_click({DetectorKind::single_photon_sensitivity, cfg.eta_c2, {}}, cascade),
      povm_click({DetectorKind::single_photon_sensitivity, cfg.eta_u2, {}}, {bx, by}),
      povm_click({DetectorKind::single_photon_sensitivity, cfg.eta_v2, {}}, {cx, cy})};
  if (cfg.model == TeleportModel::cascade)
    outcome.push_back(povm_no_click({DetectorKind::single_photon_sensitivity, cfg.eta_c2, {}}, {ay}));
  else
    outcome.push_back(povm_trace({ay}));

  TeleportSimulation res;
  for (const auto& [k, t] : terms) res.truncated = res.truncated || t.truncated();
  for (const auto& [kk, ket] : terms) {
    for (const auto& [kb, bra] : terms) {
      auto r = apply_outcome_cross(ket, bra, outcome);
      if (r.empty()) continue;
      int x1 = kk.first + kb.first, x2 = kk.second + kb.second;
      for (const auto& [key, v] : r.entries())
        if (total(key.first) != total(key.second)) res.cross_sector_max = std::max(res.cross_sector_max, std::abs(v));
      if (x1 % 2 || x2 % 2) {
        for (const auto& [key, v] : r.entries()) res.odd_power_max = std::max(res.odd_power_max, std::abs(v));
        continue;
      }
      int a = x1 / 2, b = x2 / 2;
      if (a + b > cfg.order) continue;
      r *= 1.0 / std::pow(2.0, a + b);
      DensityOperator rb(bob_register(), cutoff);
      for (const auto& [key, v] : r.entries()) rb.add(key.first, key.second, v);
      detail::add_block(res.blocks, {a, b}, rb);
    }
  }
  // Drop cancelled blocks.
  for (auto it = res.blocks.begin(); it != res.blocks.end();)
    it = it->second.empty() ? res.blocks.erase(it) : std::next(it);
  return res;
}

/// Sum of blocks with total order <= max_order at the given probabilities.
inline DensityOperator sum_blocks(const OrderedBlocks& blocks, double p1, double p2, int max_order) {
  DensityOperator r(bob_register(), 6);
  for (const auto& [k, b] : blocks)
    if (k.first + k.second <= max_order) {
      auto t = b;
      t *= std::pow(p1, k.first) * std::pow(p2, k.second);
      for (const auto& [key, v] : t.entries()) r.add(key.first, key.second, v);
    }
  return r;
}

inline double fidelity_from_blocks(const OrderedBlocks& blocks, double p1, double p2, int max_order,
                                   double theta, double phi) {
  return fidelity(sum_blocks(blocks, p1, p2, max_order), psi_theta(theta, phi, 6));
}

/// Largest relative difference between matching blocks (entries normalised by
/// the largest entry of the reference block).
inline double block_difference(const OrderedBlocks& a, const OrderedBlocks& b) {
  double worst = 0;
  std::set<std::pair<int, int>> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  for (const auto& k : keys) {
    DensityOperator za(bob_register(), 6), zb(bob_register(), 6);
    const auto& A = a.count(k) ? a.at(k) : za;
    const auto& B = b.count(k) ? b.at(k) : zb;
    double scale = 0;
    for (const auto& [key, v] : B.entries()) scale = std::max(scale, std::abs(v));
    for (const auto& [key, v] : A.entries()) scale = std::max(scale, std::abs(v));
    if (scale == 0) continue;
    auto d = A;
    d += cplx(-1.0) * B;
    for (const auto& [key, v] : d.entries()) worst = std::max(worst, std::abs(v) / scale);
  }
  return worst;
}

/// F = N p2 / (p1 [1 + (5N-3)(1-eta_c^2)] + N p2).
inline double teleport_fidelity_2(const InnsbruckConfig& cfg) {
  const double N = cfg.N;
  return N * cfg.p2 / (cfg.p1 * (1 + (5 * N - 3) * (1 - cfg.eta_c2)) + N * cfg.p2);
}

/// a_y undetected, p1 = p2: vacuum weight (3 - eta^2) against one.
inline double teleport_fidelity_actual(double eta2) { return 1.0 / (4.0 - eta2); }

/// Efficiency threshold for F >= 3/4 from the order-2 closed form.
inline double cascade_efficiency_bound(int N, double p1, double p2) {
  if (N < 1) throw std::invalid_argument("N >= 1 required");
  return ((15.0 * N - 6) * p1 - N * p2) / ((15.0 * N - 9) * p1);
}

/// N -> infinity limit of cascade_efficiency_bound.
inline double cascade_efficiency_bound_limit(double p1, double p2) { return (15 * p1 - p2) / (15 * p1); }

inline double teleport_fidelity_3(double p, double eta2) {
  const double e = eta2;
  return (4 + p * (2 - e) * (2 - e)) / (4 * (4 - e) + p * (80 - 76 * e + 34 * e * e - 3 * e * e * e));
}

/// Smallest cascade size whose order-2 fidelity reaches F at p1 = p2; the
/// fidelity is taken from `fid(N)`. Returns 0 when none up to N_max does.
template <class Fid>
int minimal_cascade_size(Fid fid, double F, int N_max) {
  for (int N = 1; N <= N_max; ++N)
    if (fid(N) >= F) return N;
  return 0;
}

// ---------------------------------------------------------------------------
// Entanglement swapping.
// ---------------------------------------------------------------------------

/// Modes (1x, 1y, 4x, 4y): Victor's outer photon and Bob's.
inline Register swap_register() { return Register({{1, Pol::x}, {1, Pol::y}, {4, Pol::x}, {4, Pol::y}}); }

/// Two sources at total pair order two, beam splitter on the inner branches,
/// polarising beam splitters and one photon of polarisation j in u and k in v.
inline OccupationState swap_conditional(Pol j, Pol k) {
  if (j == Pol::none || k == Pol::none) throw std::invalid_argument("polarisation must be x or y");
  const Register reg = Register::polarized(4);  // a, b, c, d
  OccupationState st(reg, 4);
  for (int k1 = 0; k1 <= 2; ++k1) {
    auto s = OccupationState::vacuum(reg, 4);
    for (int i = 0; i < k1; ++i) s = apply_lplus(s, 0, 1, 2, 3);
    for (int i = 0; i < 2 - k1; ++i) s = apply_lplus(s, 4, 5, 6, 7);
    s *= 1.0 / (factorial(k1) * factorial(2 - k1));
    st += s;
  }
  st = apply_passive_unitary(st, {2, 4}, beam_splitter(std::numbers::pi / 4));
  st = apply_passive_unitary(st, {3, 5}, beam_splitter(std::numbers::pi / 4));
  Occupation u{j == Pol::x ? 1 : 0, j == Pol::y ? 1 : 0}, v{k == Pol::x ? 1 : 0, k == Pol::y ? 1 : 0};
  OccupationState out(swap_register(), 4);
  for (const auto& [n, a] : st.terms())
    if (n[2] == u[0] && n[3] == u[1] && n[4] == v[0] && n[5] == v[1]) out.add({n[0], n[1], n[6], n[7]}, a);
  return out.normalized();
}

/// Reference conditional states, in (1x, 1y, 4x, 4y) occupations.
inline OccupationState swap_conditional_reference(Pol j, Pol k) {
  OccupationState s(swap_register(), 4);
  const double h = 0.5, r = 1 / std::sqrt(2.0);
  if (j == Pol::x && k == Pol::x) {
    s.add({0, 0, 0, 2}, r);
    s.add({0, 2, 0, 0}, -r);
  } else if (j == Pol::x && k == Pol::y) {
    s.add({1, 1, 0, 0}, h);
    s.add({1, 0, 0, 1}, -h);
    s.add({0, 1, 1, 0}, h);
    s.add({0, 0, 1, 1}, -h);
  } else if (j == Pol::y && k == Pol::x) {
    s.add({1, 1, 0, 0}, h);
    s.add({1, 0, 0, 1}, h);
    s.add({0, 1, 1, 0}, -h);
    s.add({0, 0, 1, 1}, -h);
  } else if (j == Pol::y && k == Pol::y) {
    s.add({0, 0, 2, 0}, r);
    s.add({2, 0, 0, 0}, -r);
  } else {
    throw std::invalid_argument("polarisation must be x or y");
  }
  return s;
}

/// 1/4 (Phi_xy + Phi_x2 + Phi_y2 + Psi-) on modes (a_x, a_y | d_x, d_y).
inline DensityOperator swap_mixture() {
  const double r = 1 / std::sqrt(2.0);
  auto two = [&](const Occupation& p, const Occupation& q) {
    OccupationState s(swap_register(), 4);
    s.add(p, r);
    s.add(q, -r);
    return DensityOperator::pure(s);
  };
  auto rho = two({1, 1, 0, 0}, {0, 0, 1, 1});
  rho += two({2, 0, 0, 0}, {0, 0, 2, 0});
  rho += two({0, 2, 0, 0}, {0, 0, 0, 2});
  rho += two({1, 0, 0, 1}, {0, 1, 1, 0});
  rho *= 0.25;
  return rho;
}

inline std::vector<ModeLabel> swap_side2() { return {{4, Pol::x}, {4, Pol::y}}; }

inline std::vector<double> swap_mixture_pt_spectrum() {
  return partial_transpose(swap_mixture(), swap_side2()).eigenvalues();
}

/// Polarisation singlet (|x,y> - |y,x>)/sqrt2 across the same modes.
inline DensityOperator polarization_singlet() {
  OccupationState s(swap_register(), 4);
  s.add({1, 0, 0, 1}, 1 / std::sqrt(2.0));
  s.add({0, 1, 1, 0}, -1 / std::sqrt(2.0));
  return DensityOperator::pure(s);
}

inline std::vector<double> singlet_pt_spectrum() {
  return partial_transpose(polarization_singlet(), swap_side2()).eigenvalues();
}

// ---------------------------------------------------------------------------
// Nonlinear sign gate and the dual-rail entangler built from two of them.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXcd ns_unitary() {
  const double r2 = std::sqrt(2.0), q = std::pow(2.0, -0.25), w = std::sqrt(3 / r2 - 2);
  Eigen::MatrixXd U(3, 3);
  U << 1 - r2, q, w,
       q, 0.5, 0.5 - 1 / r2,
       w, 0.5 - 1 / r2, r2 - 0.5;
  return U.cast<cplx>();
}

struct NsResult {
  std::array<cplx, 3> out;  // normalised
  double probability;
};

/// Signal mode 0, ancillas 1 and 2 prepared and post-selected in |1,0>.
inline NsResult ns_gate(const std::array<cplx, 3>& in) {
  const Register reg = Register::numbered(3);
  OccupationState s(reg, 3);
  for (int n = 0; n < 3; ++n) s.add({n, 1, 0}, in[std::size_t(n)]);
  if (std::abs(s.norm2() - 1) > 1e-10) throw std::invalid_argument("input must be normalised");
  s = apply_passive_unitary(s, ns_unitary());
  NsResult r{};
  double p = 0;
  for (int n = 0; n < 3; ++n) {
    r.out[std::size_t(n)] = s.amplitude({n, 1, 0});
    p += std::norm(r.out[std::size_t(n)]);
  }
  r.probability = p;
  for (auto& a : r.out) a /= std::sqrt(p);
  return r;
}

struct CsignResult {
  OccupationState state;  // normalised, modes a1..a4
  double probability;
  double entanglement;    // bits across (a1 a2 | a3 a4)
  double bell_fidelity;   // best overlap with a dual-rail Bell state
  int detected_photons;
};

/// [[cos t, sin t], [-sin t, cos t]].
inline Eigen::MatrixXcd rotation_bs(double t) {
  Eigen::MatrixXcd B(2, 2);
  B << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  return B;
}

inline Eigen::MatrixXcd hadamard() {
  Eigen::MatrixXcd H(2, 2);
  H << 1, 1, 1, -1;
  return H / std::sqrt(2.0);
}

inline CsignResult csign_entangler() {
  const Register reg = Register::numbered(8);
  auto s = OccupationState::basis(reg, 4, {1, 0, 1, 0, 1, 0, 1, 0});
  s = apply_passive_unitary(s, {0, 1}, hadamard());
  s = apply_passive_unitary(s, {2, 3}, hadamard());
  s = apply_passive_unitary(s, {0, 2}, rotation_bs(std::numbers::pi / 4));
  s = apply_passive_unitary(s, {0, 4, 5}, ns_unitary());
  s = apply_passive_unitary(s, {2, 6, 7}, ns_unitary());
  s = apply_passive_unitary(s, {0, 2}, rotation_bs(-std::numbers::pi / 4));
  s = apply_passive_unitary(s, {2, 3}, hadamard());
  const Register out_reg({{0, Pol::none}, {1, Pol::none}, {2, Pol::none}, {3, Pol::none}});
  OccupationState o(out_reg, 4);
  for (const auto& [n, a] : s.terms())
    if (n[4] == 1 && n[5] == 0 && n[6] == 1 && n[7] == 0) o.add({n[0], n[1], n[2], n[3]}, a);
  CsignResult r{o.normalized(), o.norm2(), 0, 0, 0};
  r.entanglement = entanglement_measure(r.state, {{0, Pol::none}, {1, Pol::none}});
  // Dual-rail Bell states: logical |0> = photon in the first rail of a pair.
  const std::array<Occupation, 4> q{Occupation{1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}};
  const double h = 1 / std::sqrt(2.0);
  const std::array<std::array<double, 4>, 4> bell{{{h, 0, 0, h}, {h, 0, 0, -h}, {0, h, h, 0}, {0, h, -h, 0}}};
  for (const auto& b : bell) {
    cplx ov{};
    for (std::size_t i = 0; i < 4; ++i) ov += b[i] * r.state.amplitude(q[i]);
    r.bell_fidelity = std::max(r.bell_fidelity, std::norm(ov));
  }
  // Two heralded input photons, one heralded ancilla photon per gate input and
  // one detected ancilla photon per gate output.
  r.detected_photons = 2 + 2 * 1 + 2 * 1;
  return r;
}

// ---------------------------------------------------------------------------
// Qudit teleportation.
// ---------------------------------------------------------------------------

/// |psi_nm> = sum_j e^{2 pi i j n/d} |j, j+m> / sqrt d, index a*d + b.
inline Eigen::VectorXcd qudit_bell(int d, int n, int m) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  for (int j = 0; j < d; ++j) v(j * d + (j + m) % d) = std::polar(1 / std::sqrt(double(d)), 2 * std::numbers::pi * j * n / d);
  return v;
}

/// U_nm = sum_k e^{2 pi i k n/d} |k><k+m|.
inline Eigen::MatrixXcd qudit_correction(int d, int n, int m) {
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) U(k, (k + m) % d) = std::polar(1.0, 2 * std::numbers::pi * k * n / d);
  return U;
}

struct QuditTeleport {
  Eigen::VectorXcd output;  // corrected, normalised
  double probability;
};

inline QuditTeleport qudit_teleport(int d, const Eigen::VectorXcd& in, int n, int m) {
  if (d < 2) throw std::invalid_argument("d >= 2 required");
  if (in.size() != d) throw std::invalid_argument("input dimension mismatch");
  if (n < 0 || m < 0 || n >= d || m >= d) throw std::invalid_argument("outcome outside Z_d");
  Eigen::VectorXcd resource = qudit_bell(d, 0, 0);
  Eigen::VectorXcd bell = qudit_bell(d, n, m);
  Eigen::VectorXcd bob = Eigen::VectorXcd::Zero(d);
  // <psi_nm|_{12} (|in>_1 |resource>_{23})
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) bob(c) += std::conj(bell(a * d + b)) * in(a) * resource(b * d + c);
  double p = bob.squaredNorm() / in.squaredNorm();
  Eigen::VectorXcd out = qudit_correction(d, n, m) * bob;
  return {out / out.norm(), p};
}

// ---------------------------------------------------------------------------
// Three-photon post-selection from a double-pair source.
// ---------------------------------------------------------------------------

struct GhzBranch {
  Occupation d;  // (D1x, D1y, D2x, D2y, D3x, D3y)
  cplx amplitude;
  std::string label;  // |D1,D2,D3> in polarisation notation
};

struct GhzResult {
  std::vector<GhzBranch> branches;  // conditioned on one trigger photon
  Eigen::VectorXcd postselected;    // qubits (x=0, y=1) of D1, D2, D3
  double coincidence_probability;
  double visibility_45;
  double non_xyxy_fourfold;         // four-fold weight from branches other than |xy,xy>
};

inline std::string ghz_label(const Occupation& d) {
  auto one = [](int nx, int ny) {
    std::string s;
    for (int i = 0; i < nx; ++i) s += 'x';
    for (int i = 0; i < ny; ++i) s += 'y';
    return s.empty() ? std::string("0") : s;
  };
  return "|" + one(d[0], d[1]) + "," + one(d[2], d[3]) + "," + one(d[4], d[5]) + ">";
}

/// Double-pair source; PBS1 sends a_x to the trigger and a_y through a plate
/// y -> (x + y)/sqrt2; b meets a 50:50 splitter towards D3; PBS2 maps
/// A_x -> D1, A_y -> D2, B'_x -> D2, B'_y -> D1.
inline GhzResult ghz_postselect(int xi_order = 2) {
  if (xi_order != 2) throw std::invalid_argument("only the double-pair order triggers four detectors");
  // Register: 0 T(=a_x), 1 A_y(=a_y), 2 B'_x(=b_x), 3 B'_y(=b_y), 4 A_x, 5 D3x, 6 D3y.
  const Register reg = Register::numbered(7);
  auto s = OccupationState::vacuum(reg, 4);
  s = apply_lplus(apply_lplus(s, 0, 1, 2, 3), 0, 1, 2, 3);
  s *= 1 / std::sqrt(12.0);
  Eigen::MatrixXcd plate(2, 2);  // columns: images of A_x^dag, A_y^dag on (A_x, A_y)
  plate << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  s = apply_passive_unitary(s, {4, 1}, plate);
  s = apply_passive_unitary(s, {2, 5}, beam_splitter(std::numbers::pi / 4));
  s = apply_passive_unitary(s, {3, 6}, beam_splitter(std::numbers::pi / 4));

  GhzResult r{};
  auto to_d = [](const Occupation& n) { return Occupation{n[4], n[3], n[2], n[1], n[5], n[6]}; };
  std::map<Occupation, cplx> cond;
  for (const auto& [n, a] : s.terms())
    if (n[0] == 1) cond[to_d(n)] += a;
  for (const auto& [d, a] : cond) r.branches.push_back({d, a, ghz_label(d)});

  r.postselected = Eigen::VectorXcd::Zero(8);
  for (const auto& [d, a] : cond) {
    if (d[0] + d[1] != 1 || d[2] + d[3] != 1 || d[4] + d[5] != 1) continue;
    r.postselected(d[1] * 4 + d[3] * 2 + d[5]) += a;
  }
  r.coincidence_probability = r.postselected.squaredNorm();
  r.postselected /= r.postselected.norm();
  // <X X X> after 45 degree rotation of every analyser.
  Eigen::VectorXcd flipped(8);
  for (int i = 0; i < 8; ++i) flipped(i ^ 7) = r.postselected(i);
  r.visibility_45 = std::abs(r.postselected.dot(flipped));

  // Four-fold events from the |x^2,y^2> and |y^2,x^2> parts alone.
  auto other = OccupationState::vacuum(reg, 4);
  {
    auto t1 = apply_creation(apply_creation(apply_creation(apply_creation(other, 0), 0), 3), 3);
    auto t2 = apply_creation(apply_creation(apply_creation(apply_creation(other, 1), 1), 2), 2);
    other = t1 + t2;
    other *= 1 / std::sqrt(12.0);
  }
  other = apply_passive_unitary(other, {4, 1}, plate);
  other = apply_passive_unitary(other, {2, 5}, beam_splitter(std::numbers::pi / 4));
  other = apply_passive_unitary(other, {3, 6}, beam_splitter(std::numbers::pi / 4));
  for (const auto& [n, a] : other.terms()) {
    auto d = to_d(n);
    if (n[0] >= 1 && d[0] + d[1] >= 1 && d[2] + d[3] >= 1 && d[4] + d[5] >= 1) r.non_xyxy_fourfold += std::norm(a);
  }
  return r;
}

}  // namespace qoptics

#endif  // QOPTICS_EXPERIMENTS_HPP
