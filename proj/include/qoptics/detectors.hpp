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

#ifndef QOPTICS_DETECTORS_HPP
#define QOPTICS_DETECTORS_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qoptics/fockcore.hpp"
#include "qoptics/gaussian.hpp"
#include "qoptics/mdhp.hpp"

namespace qoptics {

enum class DetectorKind { single_photon_sensitivity, single_photon_resolution };

/// Discrete spectral distribution; energies hbar*nu in the same unit as kT.
struct ThermalNoise {
  double kT = 0.0;
  std::vector<double> energy{1.0};
  std::vector<double> weight{1.0};

  void validate() const {
    if (kT < 0) throw std::invalid_argument("negative temperature");
    if (energy.size() != weight.size() || energy.empty()) throw std::invalid_argument("bad spectrum");
    double s = 0;
    for (double w : weight) {
      if (w < 0) throw std::invalid_argument("negative spectral weight");
      s += w;
    }
    if (std::abs(s - 1) > 1e-12) throw std::invalid_argument("spectral weights must sum to one");
  }
};

struct DetectorModel {
  DetectorKind kind = DetectorKind::single_photon_sensitivity;
  double eta2 = 1.0;
  std::optional<ThermalNoise> dark;

  void validate() const {
    if (eta2 < 0 || eta2 > 1) throw std::invalid_argument("efficiency must lie in [0,1]");
  }
};

/// Diagonal POVM element acting on a set of register modes; the weight sees
/// only the occupations of those modes.
struct PovmElement {
  std::vector<std::size_t> modes;
  std::function<double(const Occupation&)> weight;
  std::string label;

  double operator()(const Occupation& full) const {
    Occupation sub;
    sub.reserve(modes.size());
    for (auto m : modes) sub.push_back(full[m]);
    return weight(sub);
  }
};

inline PovmElement povm_no_click(const DetectorModel& d, std::vector<std::size_t> modes) {
  d.validate();
  const double loss = 1 - d.eta2;
  return {std::move(modes), [loss](const Occupation& n) { return std::pow(loss, total(n)); }, "no-click"};
}

inline PovmElement povm_click(const DetectorModel& d, std::vector<std::size_t> modes) {
  d.validate();
  const double loss = 1 - d.eta2;
  return {std::move(modes), [loss](const Occupation& n) { return 1 - std::pow(loss, total(n)); }, "click"};
}

/// Photon-number-resolving detector registering exactly k photons.
inline PovmElement povm_count(const DetectorModel& d, std::vector<std::size_t> modes, int k) {
  d.validate();
  const double e = d.eta2;
  return {std::move(modes),
          [e, k](const Occupation& occ) {
            int n = total(occ);
            if (k > n) return 0.0;
            double c = factorial(n) / (factorial(k) * factorial(n - k));
            return c * std::pow(e, k) * std::pow(1 - e, n - k);
          },
          "count-" + std::to_string(k)};
}

/// Exactly one of the listed polarisation-sensitive detectors fires.
inline PovmElement povm_single_click(const DetectorModel& d, std::vector<std::size_t> modes) {
  d.validate();
  const double loss = 1 - d.eta2;
  return {std::move(modes),
          [loss](const Occupation& n) {
            double s = 0;
            for (std::size_t i = 0; i < n.size(); ++i) {
              double w = 1 - std::pow(loss, n[i]);
              for (std::size_t j = 0; j < n.size(); ++j)
                if (j != i) w *= std::pow(loss, n[j]);
              s += w;
            }
            return s;
          },
          "single-click"};
}

/// Largest deviation of sum_E E from identity over all occupations of `nmodes`
/// modes with at most `cutoff` photons.
inline double completeness_defect(const std::vector<PovmElement>& family, std::size_t nmodes, int cutoff) {
  double worst = 0;
  Occupation n(nmodes, 0);
  std::function<void(std::size_t, int)> walk = [&](std::size_t pos, int left) {
    if (pos == nmodes) {
      double s = 0;
      for (const auto& e : family) s += e(n);
      worst = std::max(worst, std::abs(s - 1));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      n[pos] = k;
      walk(pos + 1, left - k);
    }
    n[pos] = 0;
  };
  walk(0, cutoff);
  return worst;
}

struct Conditioned {
  DensityOperator rho;  // normalised, on the undetected modes
  double probability;
};

namespace detail {

inline std::vector<std::size_t> detected_modes(const std::vector<PovmElement>& outcome, std::size_t nreg) {
  std::set<std::size_t> seen;
  for (const auto& e : outcome)
    for (auto m : e.modes) {
      if (m >= nreg) throw std::out_of_range("POVM mode outside register");
      if (!seen.insert(m).second) throw std::invalid_argument("POVM elements must act on disjoint modes");
    }
  return {seen.begin(), seen.end()};
}

inline double outcome_weight(const std::vector<PovmElement>& outcome, const Occupation& n) {
  double w = 1;
  for (const auto& e : outcome) {
    w *= e(n);
    if (w == 0) break;
  }
  return w;
}

}  // namespace detail

/// Tr_detected[E rho] without normalisation; the result lives on the modes
/// not touched by any element of `outcome`.
inline DensityOperator apply_outcome(const DensityOperator& rho, const std::vector<PovmElement>& outcome) {
  auto det = detail::detected_modes(outcome, rho.reg().size());
  std::vector<bool> is_det(rho.reg().size(), false);
  for (auto m : det) is_det[m] = true;
  std::vector<ModeLabel> keep;
  std::vector<std::size_t> keep_idx;
  for (std::size_t i = 0; i < rho.reg().size(); ++i)
    if (!is_det[i]) {
      keep.push_back(rho.reg()[i]);
      keep_idx.push_back(i);
    }
  if (keep.empty()) throw std::invalid_argument("outcome leaves no undetected mode");
  DensityOperator out(Register(keep), rho.cutoff());
  for (const auto& [k, v] : rho.entries()) {
    bool diag = true;
    for (auto m : det)
      if (k.first[m] != k.second[m]) diag = false;
    if (!diag) continue;
    double w = detail::outcome_weight(outcome, k.first);
    if (w == 0) continue;
    Occupation a, b;
    for (auto i : keep_idx) {
      a.push_back(k.first[i]);
      b.push_back(k.second[i]);
    }
    out.add(a, b, w * v);
  }
  return out;
}

inline Conditioned condition_state(const DensityOperator& rho, const std::vector<PovmElement>& outcome) {
  auto out = apply_outcome(rho, outcome);
  double p = out.trace().real();
  if (!(p > 1e-300)) throw std::domain_error("outcome has zero probability");
  return {out.normalized(), p};
}

/// Tr_detected[E |ket><bra|] without forming the outer product in full.
inline DensityOperator apply_outcome_cross(const OccupationState& ket, const OccupationState& bra,
                                           const std::vector<PovmElement>& outcome) {
  if (!(ket.reg() == bra.reg())) throw std::invalid_argument("register mismatch");
  auto det = detail::detected_modes(outcome, ket.reg().size());
  std::vector<bool> is_det(ket.reg().size(), false);
  for (auto m : det) is_det[m] = true;
  std::vector<ModeLabel> keep;
  std::vector<std::size_t> keep_idx;
  for (std::size_t i = 0; i < ket.reg().size(); ++i)
    if (!is_det[i]) {
      keep.push_back(ket.reg()[i]);
      keep_idx.push_back(i);
    }
  if (keep.empty()) throw std::invalid_argument("outcome leaves no undetected mode");
  using Group = std::map<Occupation, std::vector<std::pair<Occupation, cplx>>>;
  auto split = [&](const OccupationState& s) {
    Group g;
    for (const auto& [n, a] : s.terms()) {
      Occupation d, u;
      for (auto m : det) d.push_back(n[m]);
      for (auto i : keep_idx) u.push_back(n[i]);
      g[d].emplace_back(u, a);
    }
    return g;
  };
  Group gk = split(ket);
  Group gb = &ket == &bra ? gk : split(bra);
  DensityOperator out(Register(keep), std::max(ket.cutoff(), bra.cutoff()));
  Occupation full(ket.reg().size(), 0);
  for (const auto& [d, lk] : gk) {
    auto it = gb.find(d);
    if (it == gb.end()) continue;
    for (std::size_t k = 0; k < det.size(); ++k) full[det[k]] = d[k];
    double w = detail::outcome_weight(outcome, full);
    if (w == 0) continue;
    for (const auto& [u1, a1] : lk)
      for (const auto& [u2, a2] : it->second) out.add(u1, u2, w * a1 * std::conj(a2));
  }
  return out;
}

/// Same as apply_outcome on |psi><psi|.
inline DensityOperator apply_outcome_pure(const OccupationState& psi, const std::vector<PovmElement>& outcome) {
  return apply_outcome_cross(psi, psi, outcome);
}

/// Identity on the listed modes; marks them as traced out.
inline PovmElement povm_trace(std::vector<std::size_t> modes) {
  return {std::move(modes), [](const Occupation&) { return 1.0; }, "trace"};
}

inline Conditioned condition_pure(const OccupationState& psi, const std::vector<PovmElement>& outcome) {
  auto out = apply_outcome_pure(psi, outcome);
  double p = out.trace().real();
  if (!(p > 1e-300)) throw std::domain_error("outcome has zero probability");
  return {out.normalized(), p};
}

struct CascadeConfig {
  int N = 1;
  double eta2 = 1.0;
  bool polarization_sensitive = true;

  void validate() const {
    if (N < 1) throw std::invalid_argument("cascade needs N >= 1");
    if (eta2 < 0 || eta2 > 1) throw std::invalid_argument("efficiency must lie in [0,1]");
  }
};

/// Symmetric defining matrix [[0, -U^dag], [-conj(U), 0]] for input modes
/// followed by output modes. H_(k,n)(0) = sqrt(k! n!) conj(<n|U|k>).
inline Eigen::MatrixXcd transition_matrix(const Eigen::MatrixXcd& U) {
  const auto d = U.rows();
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  R.topRightCorner(d, d) = -U.adjoint();
  R.bottomLeftCorner(d, d) = -U.conjugate();
  return R;
}

/// |<n|U|k>|^2 from the Hermite polynomial at zero.
inline double transition_probability(const Eigen::MatrixXcd& R, const Occupation& in, const Occupation& out) {
  Occupation idx = in;
  idx.insert(idx.end(), out.begin(), out.end());
  double f = 1;
  for (int v : idx) f *= factorial(v);
  return std::norm(mdhp::evaluate_at_zero(R, idx)) / f;
}

inline void for_each_occupation(std::size_t nmodes, int photons, const std::function<void(const Occupation&)>& fn) {
  Occupation n(nmodes, 0);
  std::function<void(std::size_t, int)> walk = [&](std::size_t pos, int left) {
    if (pos + 1 == nmodes) {
      n[pos] = left;
      fn(n);
      n[pos] = 0;
      return;
    }
    for (int k = 0; k <= left; ++k) {
      n[pos] = k;
      walk(pos + 1, left - k);
    }
    n[pos] = 0;
  };
  if (nmodes == 0) return;
  walk(0, photons);
}

/// p_N(k|m): m photons enter port 1; exactly k of the N detector modes are
/// occupied. Loss modes may hold anything.
inline double cascade_probability(const CascadeConfig& cfg, int k, int m) {
  cfg.validate();
  if (k < 0 || m < 0) throw std::invalid_argument("negative count");
  if (k > m) return 0.0;
  const int N = cfg.N;
  auto R = transition_matrix(cascade_unitary(N, std::sqrt(cfg.eta2)));
  Occupation in(std::size_t(2 * N), 0);
  in[0] = m;
  double p = 0;
  for_each_occupation(std::size_t(2 * N), m, [&](const Occupation& out) {
    int nz = 0;
    for (int i = 0; i < N; ++i) nz += out[std::size_t(i)] > 0;
    if (nz == k) p += transition_probability(R, in, out);
  });
  return p;
}

/// Same quantity from the Fock-space ladder expansion, no Hermite polynomials.
inline double cascade_probability_fock(const CascadeConfig& cfg, int k, int m) {
  cfg.validate();
  if (k < 0 || m < 0) throw std::invalid_argument("negative count");
  const int N = cfg.N;
  Occupation in(std::size_t(2 * N), 0);
  in[0] = m;
  auto s = OccupationState::basis(Register::numbered(2 * N), m, in);
  s = apply_passive_unitary(s, cascade_unitary(N, std::sqrt(cfg.eta2)));
  double p = 0;
  for (const auto& [n, a] : s.terms()) {
    int nz = 0;
    for (int i = 0; i < N; ++i) nz += n[std::size_t(i)] > 0;
    if (nz == k) p += std::norm(a);
  }
  return p;
}

inline double cascade_kk_closed_form(const CascadeConfig& cfg, int k) {
  cfg.validate();
  if (k < 0) throw std::invalid_argument("negative count");
  if (k > cfg.N) return 0.0;
  return std::pow(cfg.eta2, k) * factorial(cfg.N) / (std::pow(double(cfg.N), k) * factorial(cfg.N - k));
}

/// Closed forms for m <= 2.
inline double cascade_closed_form(const CascadeConfig& cfg, int k, int m) {
  const double e = cfg.eta2, N = cfg.N;
  if (m == 0) return k == 0 ? 1.0 : 0.0;
  if (m == 1) return k == 0 ? 1 - e : (k == 1 ? e : 0.0);
  if (m == 2) {
    if (k == 0) return (1 - e) * (1 - e);
    if (k == 1) return e * e / N + 2 * e * (1 - e);
    if (k == 2) return (N - 1) * e * e / N;
    return 0.0;
  }
  throw std::invalid_argument("closed forms cover m <= 2 only");
}

/// Single-mode dark-count state, Planck weights averaged over the spectrum and
/// renormalised after truncation.
inline DensityOperator thermal_state(const ThermalNoise& noise, int cutoff) {
  noise.validate();
  DensityOperator rho(Register::numbered(1), cutoff);
  if (noise.kT == 0) {
    rho.add({0}, {0}, 1.0);
    return rho;
  }
  std::vector<double> w(std::size_t(cutoff) + 1, 0.0);
  for (std::size_t s = 0; s < noise.energy.size(); ++s) {
    double x = noise.energy[s] / noise.kT;
    for (int n = 0; n <= cutoff; ++n) w[std::size_t(n)] += noise.weight[s] * (1 - std::exp(-x)) * std::exp(-n * x);
  }
  double tot = 0;
  for (double v : w) tot += v;
  for (int n = 0; n <= cutoff; ++n) rho.add({n}, {n}, w[std::size_t(n)] / tot);
  return rho;
}

}  // namespace qoptics

#endif  // QOPTICS_DETECTORS_HPP
