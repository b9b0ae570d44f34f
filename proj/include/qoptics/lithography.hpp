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

#ifndef QOPTICS_LITHOGRAPHY_HPP
#define QOPTICS_LITHOGRAPHY_HPP

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qoptics::litho {

using cplx = std::complex<double>;
inline constexpr double kTwoPi = 2 * std::numbers::pi;

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// Normalisation: Delta(m = 0, theta = 0, phi = 0) = 2.
inline double deposition_basic(int N, double phi) {
  if (N < 1) throw std::invalid_argument("N >= 1 required");
  return 1 + std::cos(N * phi);
}

inline void check_m(int N, int m) {
  if (N < 1) throw std::invalid_argument("N >= 1 required");
  if (m < 0 || 2 * m > N) throw std::invalid_argument("m must lie in [0, N/2]");
}

/// sqrt(C(N,m)/2) (e^{i m phi} + e^{i (N-m) phi + i theta}); the deposition
/// matrix element between two such branches is conj(v_m) v_m'.
inline cplx branch_amplitude(int N, int m, double theta, double phi) {
  check_m(N, m);
  return std::sqrt(binomial(N, m) / 2) * (std::polar(1.0, m * phi) + std::polar(1.0, (N - m) * phi + theta));
}

inline double deposition_general(int N, int m, double theta, double phi) {
  check_m(N, m);
  return binomial(N, m) * (1 + std::cos((N - 2 * m) * phi + theta));
}

/// The four-exponential bracket without its binomial weight.
inline cplx cross_bracket(int N, int m, int mp, double th, double thp, double phi) {
  return std::polar(1.0, (mp - m) * phi) + std::polar(1.0, (N - m - mp) * phi + thp) +
         std::polar(1.0, -(N - m - mp) * phi - th) + std::polar(1.0, -(mp - m) * phi + thp - th);
}

inline cplx deposition_cross(int N, int m, int mp, double th, double thp, double phi) {
  check_m(N, m);
  check_m(N, mp);
  return 0.5 * std::sqrt(binomial(N, m) * binomial(N, mp)) * cross_bracket(N, m, mp, th, thp, phi);
}

struct LithoTerm {
  int m;
  double theta;
  cplx alpha;
};

/// sum_terms alpha |psi_{N m theta}>. Terms may repeat m with different theta.
struct LithoState1D {
  int N = 1;
  std::vector<LithoTerm> terms;

  double norm2() const {
    double s = 0;
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = 0; j < terms.size(); ++j) {
        const auto& a = terms[i];
        const auto& b = terms[j];
        if (a.m != b.m) continue;
        cplx ov = std::conj(a.alpha) * b.alpha;
        // m < N/2: <psi_m(th)|psi_m(th')> = (1 + e^{i(th'-th)})/2. At m = N/2
        // both branches are the same Fock state.
        cplx g = (2 * a.m == N) ? std::conj(1.0 + std::polar(1.0, a.theta)) * (1.0 + std::polar(1.0, b.theta)) / 2.0
                                : 0.5 * (1.0 + std::polar(1.0, b.theta - a.theta));
        s += (ov * g).real();
      }
    return s;
  }

  void validate(double tol = 1e-9) const {
    for (const auto& t : terms) check_m(N, t.m);
    if (std::abs(norm2() - 1) > tol) throw std::invalid_argument("state must be normalised");
  }
};

/// |sum alpha_m v_m(phi)|^2. Since Delta_{mm'} = conj(Delta_{m'm}) holds for
/// the bracket itself, symmetrising the double sum changes nothing.
inline double deposition_superposition(const LithoState1D& s, double phi) {
  cplx a{};
  for (const auto& t : s.terms) a += t.alpha * branch_amplitude(s.N, t.m, t.theta, phi);
  return std::norm(a);
}

inline std::vector<double> uniform_grid(int n) {
  if (n < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[std::size_t(i)] = kTwoPi * i / n;
  return g;
}

struct FourierTerm {
  int n;
  double a;  // cos coefficient
  double b;  // sin coefficient
};

struct PseudoFourier {
  std::vector<double> phi;
  std::vector<double> P;
  double Q;                   // sum of c_n
  std::vector<double> c;      // per term
  std::vector<double> theta;  // per term, c cos(n phi + theta) = a cos n phi + b sin n phi
};

/// P = t sum c_n (1 + cos(n phi + theta_n)) = Q t + t sum (a_n cos + b_n sin).
inline PseudoFourier pseudo_fourier_pattern(const std::vector<FourierTerm>& coeffs, double t, int grid = 1024) {
  PseudoFourier r;
  r.phi = uniform_grid(grid);
  r.Q = 0;
  for (const auto& k : coeffs) {
    if (k.n < 0) throw std::invalid_argument("negative harmonic");
    double c = std::hypot(k.a, k.b);
    r.c.push_back(c);
    r.theta.push_back(std::atan2(-k.b, k.a));
    r.Q += c;
  }
  for (double p : r.phi) {
    double v = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) v += r.c[i] * (1 + std::cos(coeffs[i].n * p + r.theta[i]));
    r.P.push_back(t * v);
  }
  return r;
}

/// (-1)^q/(2q+1) cos((2q+1) phi) for q = 0..q_max.
inline std::vector<FourierTerm> trench_fourier(int q_max) {
  if (q_max < 0) throw std::invalid_argument("q_max >= 0 required");
  std::vector<FourierTerm> v;
  for (int q = 0; q <= q_max; ++q) v.push_back({2 * q + 1, (q % 2 ? -1.0 : 1.0) / (2 * q + 1), 0.0});
  return v;
}

/// Largest q with 2q + 1 <= photon budget.
inline int trench_q_max(int budget) {
  if (budget < 1) throw std::invalid_argument("budget >= 1 required");
  return (budget - 1) / 2;
}

/// h on (-pi/2, pi/2) mod 2 pi, 0 elsewhere.
inline double trench(double phi, double h = 1.0) {
  double x = std::remainder(phi, kTwoPi);
  return (x > -std::numbers::pi / 2 && x < std::numbers::pi / 2) ? h : 0.0;
}

/// Least-squares Fourier fit of a trench of height h within the photon budget:
/// the series above scaled by 2h/pi, exposure time 1. The constant h/2 of the
/// trench is not representable and is left out.
inline PseudoFourier trench_pseudo_fourier(int budget, double h = 1.0, int grid = 1024) {
  auto terms = trench_fourier(trench_q_max(budget));
  for (auto& t : terms) t.a *= 2 * h / std::numbers::pi;
  return pseudo_fourier_pattern(terms, 1.0, grid);
}

struct TargetPattern {
  std::vector<double> phi;
  std::vector<double> F;
};

inline TargetPattern trench_target(int grid = 1024, double h = 1.0) {
  TargetPattern t;
  t.phi = uniform_grid(grid);
  for (double p : t.phi) t.F.push_back(trench(p, h));
  return t;
}

/// Two whitespace-separated columns (phi, F). '#' starts a comment line.
inline TargetPattern read_target(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read target file " + path);
  TargetPattern t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double p, f;
    if (!(ls >> p >> f)) throw std::runtime_error("malformed target line: " + line);
    if (!std::isfinite(p) || !std::isfinite(f)) throw std::runtime_error("non-finite target sample");
    t.phi.push_back(p);
    t.F.push_back(f);
  }
  if (t.phi.size() < 2) throw std::runtime_error("target file has fewer than two samples");
  return t;
}

/// Periodic trapezoid rule on a uniform grid over [0, 2 pi).
inline double periodic_integral(const std::vector<double>& f) {
  double s = 0;
  for (double v : f) s += v;
  return s * kTwoPi / double(f.size());
}

/// int |F - Delta t|^2 dphi.
template <class Pattern>
double objective(Pattern delta, double t, const TargetPattern& target) {
  std::vector<double> r;
  r.reserve(target.phi.size());
  for (std::size_t i = 0; i < target.phi.size(); ++i) {
    double d = target.F[i] - delta(target.phi[i]) * t;
    r.push_back(d * d);
  }
  return periodic_integral(r);
}

inline double objective(const LithoState1D& s, double t, const TargetPattern& target) {
  return objective([&](double p) { return deposition_superposition(s, p); }, t, target);
}

// ---------------------------------------------------------------------------
// Two dimensions: beams a, b along x (phase phi) and c, d along y (phase chi).
// ---------------------------------------------------------------------------

struct LithoTerm2D {
  int m;
  int k;
  cplx alpha;
};

struct LithoState2D {
  int N = 1;
  std::vector<LithoTerm2D> terms;
  std::vector<double> zeta;      // by m
  std::vector<double> zeta_bar;  // by k

  void validate() const {
    for (const auto& t : terms) {
      check_m(N, t.m);
      check_m(N, t.k);
      if (std::size_t(t.m) >= zeta.size() || std::size_t(t.k) >= zeta_bar.size())
        throw std::invalid_argument("missing relative phase");
    }
  }
};

/// C(N,m) w_m(phi) + C(N,k) u_k(chi); the deposition matrix element is half
/// the product conj(W_mk) W_m'k', which reproduces the four-block sum.
inline cplx branch_amplitude_2d(const LithoState2D& s, int m, int k, double phi, double chi) {
  const int N = s.N;
  cplx w = std::polar(1.0, m * phi) + std::polar(1.0, (N - m) * phi + s.zeta[std::size_t(m)]);
  cplx u = std::polar(1.0, k * chi) + std::polar(1.0, (N - k) * chi + s.zeta_bar[std::size_t(k)]);
  return binomial(N, m) * w + binomial(N, k) * u;
}

inline double deposition_2d(const LithoState2D& s, double phi, double chi) {
  s.validate();
  cplx a{};
  for (const auto& t : s.terms) a += t.alpha * branch_amplitude_2d(s, t.m, t.k, phi, chi);
  return 0.5 * std::norm(a);
}

/// Reference closed form for a single term (m' = m, k' = k). Its last two
/// cosines carry -zeta where deposition_2d gives +zeta; they agree at zero phases.
inline double deposition_2d_diagonal(int N, int m, int k, double zeta, double zeta_bar, double phi, double chi) {
  const double Cm = binomial(N, m), Ck = binomial(N, k);
  return Cm * Cm * (1 + std::cos((N - 2 * m) * phi + zeta)) + Ck * Ck * (1 + std::cos((N - 2 * k) * chi + zeta_bar)) +
         4 * Cm * Ck * std::cos(0.5 * (N * (phi - chi) + (zeta - zeta_bar))) *
             std::cos(0.5 * ((N - 2 * m) * phi - zeta)) * std::cos(0.5 * ((N - 2 * k) * chi - zeta_bar));
}

// ---------------------------------------------------------------------------
// Superposition fit: 2 floor(N/2)+2 basis states |psi_{N m theta}>, theta in
// {0, pi}, with complex amplitudes in consecutive (Re, Im) genes and the
// exposure time last.
// ---------------------------------------------------------------------------

struct SuperpositionBasis {
  int N;
  std::vector<LithoTerm> layout;       // alpha unused
  std::vector<std::vector<cplx>> v;    // per basis state, sampled on the target grid

  std::size_t gene_count() const { return 2 * layout.size() + 1; }
};

inline SuperpositionBasis superposition_basis(int N, const TargetPattern& target) {
  SuperpositionBasis b{N, {}, {}};
  for (int m = 0; 2 * m < N; ++m)
    for (double th : {0.0, std::numbers::pi}) b.layout.push_back({m, th, 0.0});
  for (const auto& t : b.layout) {
    std::vector<cplx> col;
    for (double p : target.phi) col.push_back(branch_amplitude(N, t.m, t.theta, p));
    b.v.push_back(std::move(col));
  }
  return b;
}

/// Amplitude genes are taken as given (normalise them first).
inline LithoState1D state_from_genes(const SuperpositionBasis& b, const std::vector<double>& g) {
  if (g.size() != b.gene_count()) throw std::invalid_argument("gene count mismatch");
  LithoState1D s{b.N, b.layout};
  for (std::size_t i = 0; i < b.layout.size(); ++i) s.terms[i].alpha = cplx(g[2 * i], g[2 * i + 1]);
  return s;
}

inline double superposition_objective(const SuperpositionBasis& b, const std::vector<double>& g,
                                      const TargetPattern& target) {
  const double t = g.back();
  const std::size_t K = b.layout.size(), P = target.phi.size();
  double s = 0;
  for (std::size_t j = 0; j < P; ++j) {
    cplx a{};
    for (std::size_t i = 0; i < K; ++i) a += cplx(g[2 * i], g[2 * i + 1]) * b.v[i][j];
    double d = target.F[j] - std::norm(a) * t;
    s += d * d;
  }
  return s * kTwoPi / double(P);
}

/// Mean of a sampled curve over the samples where the target vanishes.
inline double forbidden_mean(const std::vector<double>& curve, const TargetPattern& target) {
  double s = 0;
  int n = 0;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (target.F[i] == 0.0) {
      s += curve[i];
      ++n;
    }
  if (n == 0) throw std::invalid_argument("target has no forbidden region");
  return s / n;
}

}  // namespace qoptics::litho

#endif  // QOPTICS_LITHOGRAPHY_HPP
