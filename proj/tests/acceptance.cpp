// Copyright 2026 The qoptics Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exits 0 in report mode; with --strict any FAIL gives exit status 1.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qoptics/detectors.hpp"
#include "qoptics/entanglement.hpp"
#include "qoptics/experiments.hpp"
#include "qoptics/lithography.hpp"
#include "qoptics/mdhp.hpp"
#include "qoptics/metrology.hpp"
#include "qoptics/optimizer.hpp"

namespace {

using namespace qoptics;
using Clock = std::chrono::steady_clock;

struct Line {
  std::string text;
  bool pass;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Line> lines;

  bool pass() const {
    return std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.pass; });
  }

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    lines.push_back({buf, ok});
  }

  void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    notes.push_back(buf);
  }

  std::vector<std::string> notes;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------

Criterion nport_statistics() {
  Criterion c{1, "N-port statistics", {}, {}};
  auto t0 = Clock::now();
  double diff_fock = 0, diff_closed = 0;
  int cells = 0;
  for (int N = 1; N <= 4; ++N)
    for (double e : {1.0, 0.5, 0.1})
      for (int m = 0; m <= 3; ++m)
        for (int k = 0; k <= m; ++k) {
          CascadeConfig cfg{N, e, true};
          double h = cascade_probability(cfg, k, m);
          diff_fock = std::max(diff_fock, std::abs(h - cascade_probability_fock(cfg, k, m)));
          if (m <= 2) diff_closed = std::max(diff_closed, std::abs(h - cascade_closed_form(cfg, k, m)));
          if (k == m) diff_closed = std::max(diff_closed, std::abs(h - cascade_kk_closed_form(cfg, k)));
          ++cells;
        }
  double dt = seconds_since(t0);
  c.check(diff_fock <= 1e-10, "max |hermite - fock| = %.3g over %d cells (tol 1e-10)", diff_fock, cells);
  c.check(diff_closed <= 1e-12, "max |closed form - hermite| = %.3g (tol 1e-12, floating-point exact)", diff_closed);
  c.check(dt < 5, "runtime %.2f s (limit 5 s)", dt);
  return c;
}

// ---------------------------------------------------------------------------

// Three-level source c_1|1> + c_2|2> with delta = |c_2/c_1|^2 = 1; one photon
// registered by a resolving detector of efficiency eta2.
double resolution_confidence(double eta2) {
  DetectorModel d{DetectorKind::single_photon_resolution, eta2, std::nullopt};
  auto E = povm_count(d, {0}, 1);
  PreparationScenario s;
  s.c = {0.0, std::sqrt(0.5), std::sqrt(0.5)};
  Eigen::Matrix3cd diag = Eigen::Matrix3cd::Zero();
  for (int n = 0; n < 3; ++n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
    v(n) = 1;
    s.a.push_back(v);
    diag(n, n) = E.weight({n});
  }
  s.E = diag;
  s.k = 1;
  return confidence(s);
}

Criterion confidence_thresholds() {
  Criterion c{2, "Confidence thresholds", {}, {}};
  double e4 = efficiency_for_confidence([](double v) { return confidence_cascade(4, v, 1.0); }, 0.65);
  double einf = efficiency_for_confidence([](double v) { return confidence_cascade_limit(v, 1.0); }, 0.65);
  c.check(std::abs(e4 - 0.835) <= 0.005, "C = 0.65 crossing, N = 4: eta2 = %.4f (0.835 +- 0.005)", e4);
  c.check(std::abs(einf - 0.731) <= 0.005, "C = 0.65 crossing, N -> inf: eta2 = %.4f (0.731 +- 0.005)", einf);
  double C = resolution_confidence(0.88);
  c.check(std::abs(C - 0.647) <= 0.003, "resolution detector at eta2 = 0.88: C = %.4f (0.647 +- 0.003)", C);
  c.note("resolution detector: C = 1/(3 - 2 eta2) from weights eta2 (one photon) and 2 eta2 (1 - eta2) (two photons)");
  c.note("the value 0.647 follows from eta2/(4 - 3 eta2), which this detector model does not produce");
  return c;
}

// ---------------------------------------------------------------------------

InnsbruckConfig lossy(int N, double ec, TeleportModel m = TeleportModel::cascade) {
  InnsbruckConfig cfg;
  cfg.N = N;
  cfg.eta_u2 = 0.9;
  cfg.eta_v2 = 0.8;
  cfg.eta_c2 = ec;
  cfg.model = m;
  return cfg;
}

double simulated_fidelity(const InnsbruckConfig& cfg, int order = 2) {
  return fidelity_from_blocks(innsbruck_simulate(cfg).blocks, cfg.p1, cfg.p2, order, cfg.theta, cfg.phi);
}

Criterion teleportation() {
  Criterion c{3, "Teleportation", {}, {}};
  auto t0 = Clock::now();
  double F = teleport_fidelity_actual(0.1);
  c.check(std::abs(F - 1 / 3.9) <= 5e-4, "single-detector fidelity at eta2 = 0.1: %.6f (0.2564 +- 0.0005)", F);
  double Fs = simulated_fidelity(lossy(1, 0.1, TeleportModel::ay_undetected));
  c.check(std::abs(Fs - 1 / 3.9) <= 5e-4, "same, simulated: %.6f (0.2564 +- 0.0005)", Fs);

  double lim = cascade_efficiency_bound_limit(1, 1);
  c.check(lim == 14.0 / 15, "efficiency bound N -> inf: %.17g (14/15 exactly)", lim);

  int n_sim = minimal_cascade_size([](int N) { return simulated_fidelity(lossy(N, 0.98)); }, 0.75, 8);
  int n_closed = minimal_cascade_size([](int N) { return teleport_fidelity_2(lossy(N, 0.98)); }, 0.75, 8);
  c.check(n_sim == 4, "minimal cascade for F >= 3/4 at eta2 = 0.98 (simulation): N = %d (expect 4)", n_sim);
  c.note("closed-form fidelity gives N = %d for the same threshold", n_closed);

  double worst = 0;
  int worst_N = 0;
  double worst_e = 0;
  for (int N = 1; N <= 4; ++N)
    for (double e : {1.0, 0.98, 0.5, 0.1}) {
      auto cfg = lossy(N, e);
      double d = block_difference(innsbruck_simulate(cfg).blocks, innsbruck_closed_form(cfg).blocks);
      if (d > worst) {
        worst = d;
        worst_N = N;
        worst_e = e;
      }
    }
  for (double e : {1.0, 0.5, 0.1}) {
    auto cfg = lossy(1, e, TeleportModel::ay_undetected);
    worst = std::max(worst, block_difference(innsbruck_simulate(cfg).blocks, innsbruck_closed_form(cfg).blocks));
  }
  c.check(worst <= 1e-10, "simulated vs closed-form order-p^2 blocks, N <= 4: max relative diff %.3g (tol 1e-10)",
          worst);
  if (worst > 1e-10) {
    c.note("largest at N = %d, eta2 = %.2f; agreement holds for N = 1 or eta2 = 1", worst_N, worst_e);
    c.note("the closed-form vacuum coefficient 1 + (5N-3)(1-eta2) differs from the simulated 1 + (3N-1)(1-eta2)");
  }
  double dt = seconds_since(t0);
  c.check(dt < 60, "runtime %.2f s at cutoff 6 (limit 60 s)", dt);
  return c;
}

Criterion third_order() {
  Criterion c{4, "Third-order fidelity", {}, {}};
  double F2 = teleport_fidelity_actual(0.1);
  double F30 = teleport_fidelity_3(0.0, 0.1);
  c.check(F30 == F2, "F3(p = 0) = %.17g, F2 = %.17g (exact)", F30, F2);
  double shift = std::abs(teleport_fidelity_3(1e-4, 0.1) - F2) / F2;
  c.check(shift >= 1e-5 && shift <= 1e-3, "relative shift at p = 1e-4, eta2 = 0.1: %.3g (within [1e-5, 1e-3])", shift);
  auto cfg = lossy(1, 0.1, TeleportModel::ay_undetected);
  cfg.eta_u2 = cfg.eta_v2 = 1.0;
  cfg.order = 3;
  double F3s = simulated_fidelity(cfg, 3);
  double shift_sim = std::abs(F3s - F2) / F2;
  c.check(shift_sim >= 1e-5 && shift_sim <= 1e-3, "simulated relative shift: %.3g (within [1e-5, 1e-3])", shift_sim);
  return c;
}

// ---------------------------------------------------------------------------

double multiset_gap(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return INFINITY;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double w = 0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

Criterion swapping() {
  Criterion c{5, "Entanglement swapping", {}, {}};
  const double s3 = std::sqrt(3.0) / 8;
  std::vector<double> expect{0, 0, -0.125, s3, -s3};
  expect.insert(expect.end(), 9, 0.125);
  double g1 = multiset_gap(swap_mixture_pt_spectrum(), expect);
  c.check(g1 <= 1e-10, "mixture PT spectrum, max deviation %.3g (tol 1e-10)", g1);
  double g2 = multiset_gap(singlet_pt_spectrum(), {0.5, 0.5, 0.5, -0.5});
  c.check(g2 <= 1e-10, "singlet PT spectrum, max deviation %.3g (tol 1e-10)", g2);
  return c;
}

Criterion klm() {
  Criterion c{6, "Linear-optics gates", {}, {}};
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> nd;
  double worst_p = 0, worst_out = 0;
  for (int t = 0; t < 100; ++t) {
    std::array<cplx, 3> in;
    double n = 0;
    for (auto& x : in) {
      x = {nd(rng), nd(rng)};
      n += std::norm(x);
    }
    for (auto& x : in) x /= std::sqrt(n);
    auto r = ns_gate(in);
    worst_p = std::max(worst_p, std::abs(r.probability - 0.25));
    worst_out = std::max({worst_out, std::abs(r.out[0] - in[0]), std::abs(r.out[1] - in[1]),
                          std::abs(r.out[2] + in[2])});
  }
  c.check(worst_p <= 1e-10, "NS gate success, 100 random inputs: max |p - 1/4| = %.3g (tol 1e-10)", worst_p);
  c.check(worst_out <= 1e-10, "NS gate output (sign flip on |2>): max deviation %.3g (tol 1e-10)", worst_out);
  auto cs = csign_entangler();
  c.check(std::abs(cs.entanglement - 1) <= 1e-8, "C-SIGN output entanglement %.12f bits (1 +- 1e-8)", cs.entanglement);
  return c;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd random_symmetric(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd B(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) B(i, j) = B(j, i) = 0.6 * cplx(nd(rng), nd(rng));
  return B;
}

Eigen::VectorXcd random_vector(int d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd;
  Eigen::VectorXcd a(d);
  for (int i = 0; i < d; ++i) a(i) = scale * cplx(nd(rng), nd(rng));
  return a;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Criterion hermite() {
  Criterion c{7, "Multidimensional Hermite polynomials", {}, {}};
  std::mt19937_64 rng(7);
  double r_step = 0, r_diff = 0, r_gen = 0;
  for (int t = 0; t < 200; ++t) {
    int d = std::uniform_int_distribution<int>(1, 4)(rng);
    auto B = random_symmetric(d, rng);
    auto a = random_vector(d, rng, 0.7);
    mdhp::MultiIndex n(std::size_t(d), 0);
    int tot = std::uniform_int_distribution<int>(0, 5)(rng);
    while (tot-- > 0) n[std::uniform_int_distribution<std::size_t>(0, std::size_t(d) - 1)(rng)]++;
    auto i = std::uniform_int_distribution<std::size_t>(0, std::size_t(d) - 1)(rng);
    auto up = n;
    up[i]++;
    r_step = std::max(r_step, rel(mdhp::recursion_step(B, n, i, a), mdhp::evaluate(B, up, a)));
    r_diff = std::max(r_diff, mdhp::recursion_differential(B, n, i, a));

    // Generating function order by order: the degree-k part of
    // sum beta^n/n! H_n(alpha) is the t^k coefficient of exp(t u - t^2 v / 2),
    // u = alpha.B.beta, v = beta.B.beta, whose coefficients obey
    // k c_k = u c_{k-1} - v c_{k-2}.
    auto b = random_vector(d, rng, 0.7);
    cplx u = (a.transpose() * B * b)(0, 0), v = (b.transpose() * B * b)(0, 0);
    std::array<cplx, 7> coef{};
    coef[0] = 1;
    coef[1] = u;
    for (int k = 2; k <= 6; ++k) coef[std::size_t(k)] = (u * coef[std::size_t(k - 1)] - v * coef[std::size_t(k - 2)]) / double(k);
    cplx prev = 0;
    for (int k = 0; k <= 6; ++k) {
      cplx cum = mdhp::generating_function_truncated(B, a, b, k);
      r_gen = std::max(r_gen, rel(cum - prev, coef[std::size_t(k)]));
      prev = cum;
    }
  }
  c.check(r_step <= 1e-9, "three-term recursion, 200 instances: max relative residual %.3g (tol 1e-9)", r_step);
  c.check(r_diff <= 1e-9, "differential recursion, 200 instances: max relative residual %.3g (tol 1e-9)", r_diff);
  c.check(r_gen <= 1e-9, "generating function, degree 0..6 coefficients: max relative residual %.3g (tol 1e-9)", r_gen);

  std::uniform_real_distribution<double> ud(0.3, 1.5);
  double worst = 0;
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXd M(2, 2);
    M << ud(rng), ud(rng) - 0.9, 0, ud(rng);
    Eigen::MatrixXd B = M * M.transpose() + 0.3 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B1 = B.topLeftCorner(1, 1);
    for (int x = 0; x <= 3; ++x) {
      worst = std::max(worst, std::abs(mdhp::orthogonality_quadrature(B1, {x}) / mdhp::orthogonality_norm(B1, {x}) - 1));
      for (int y = 0; x + y <= 3; ++y)
        worst = std::max(worst,
                         std::abs(mdhp::orthogonality_quadrature(B, {x, y}) / mdhp::orthogonality_norm(B, {x, y}) - 1));
    }
  }
  c.check(worst <= 1e-6, "orthogonality quadrature vs norm, d <= 2: max relative deviation %.3g (tol 1e-6)", worst);
  return c;
}

// ---------------------------------------------------------------------------

Criterion pdc_statistics() {
  Criterion c{8, "Pair statistics", {}, {}};
  for (double p : {1e-2, 1e-3, 1e-4}) {
    auto d = pdc_poisson_distinguishability(p);
    double ratio = d.ds2 / (p * p / 8);
    c.check(ratio >= 0.9 && ratio <= 1.1, "p = %.0e: ds2/(p^2/8) = %.5f (within [0.9, 1.1])", p, ratio);
    auto P = pdc_distribution_small_p(p, 30);
    double s = 0;
    for (double v : P) s += v;
    c.check(std::abs(s - 1) <= 10 * p * p, "p = %.0e: sum = 1 %+.3g (tol 10 p^2 = %.1e)", p, s - 1, 10 * p * p);
  }
  return c;
}

// ---------------------------------------------------------------------------

Criterion lithography() {
  using namespace qoptics::litho;
  Criterion c{9, "Lithography", {}, {}};
  auto t0 = Clock::now();
  const double a = 1 / std::sqrt(2.0);
  LithoState1D s{20, {{9, 0.0, a}, {5, 0.0, a}}};
  s.validate();
  double z1 = deposition_superposition(s, std::numbers::pi / 2), z2 = deposition_superposition(s, 3 * std::numbers::pi / 2);
  c.check(z1 <= 1e-12 && z2 <= 1e-12, "N = 20, m = 9 and 5: deposition %.3g at pi/2, %.3g at 3pi/2 (tol 1e-12)", z1, z2);

  auto target = trench_target(1024);
  auto fourier = trench_pseudo_fourier(10);
  const double floor = fourier.Q;  // exposure time 1
  auto basis = superposition_basis(10, target);
  auto cfg = de::litho_preset(basis.gene_count(), 1);
  auto res = de::de_minimize(cfg, [&](const de::Vector& g) { return superposition_objective(basis, g, target); });
  auto st = state_from_genes(basis, res.best);
  std::vector<double> curve;
  for (double p : target.phi) curve.push_back(deposition_superposition(st, p) * res.best.back());
  double fm = forbidden_mean(curve, target);
  c.check(basis.gene_count() == 21 && cfg.population() == 210 && cfg.gen_max == 1000,
          "DE set-up: n = %zu, NP = %zu, %d generations, seed 1", basis.gene_count(), cfg.population(), cfg.gen_max);
  c.check(fm <= 0.2 * floor, "trench fit forbidden-region mean %.4g <= 0.2 x Fourier floor Q t = %.4g (ratio %.3f)", fm,
          0.2 * floor, fm / floor);
  c.note("fit objective %.4g, exposure time %.4g", res.best_cost, res.best.back());
  double dt = seconds_since(t0);
  c.check(dt <= 300, "runtime %.1f s (limit 300 s)", dt);
  return c;
}

// ---------------------------------------------------------------------------

Criterion entropy() {
  Criterion c{10, "Entropy and entanglement", {}, {}};
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  double E = entanglement_measure(bell, 2, 2);
  c.check(std::abs(E - 1) <= 1e-12, "Bell state E = %.15f bits (1 +- 1e-12)", E);

  std::mt19937_64 rng(10);
  std::normal_distribution<double> nd;
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXcd G(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) G(i, j) = {nd(rng), nd(rng)};
    Eigen::MatrixXcd rho = G * G.adjoint();
    rho /= rho.trace().real();
    Distribution diag;
    for (int i = 0; i < 3; ++i) diag.push_back(rho(i, i).real());
    if (shannon_entropy(diag) >= von_neumann_entropy(rho) - 1e-12) ++ok;
  }
  c.check(ok == 100, "Shannon >= von Neumann on %d of 100 random qutrit states", ok);

  auto tab = singlet_projector_values();
  std::array<double, 6> got{tab.Pa_prime, tab.Pb_prime, tab.PaPb, tab.PaPb_prime, tab.Pa_primePb, tab.Pa_primePb_prime};
  std::array<double, 6> want{0.5, 0.5, 0, 0.375, 0.375, 0.375};
  double g = 0;
  for (std::size_t i = 0; i < 6; ++i) g = std::max(g, std::abs(got[i] - want[i]));
  c.check(g <= 1e-15, "singlet projector table {%.3f, %.3f, %.3f, %.3f, %.3f, %.3f}, max deviation %.2g", got[0], got[1],
          got[2], got[3], got[4], got[5], g);
  bool violates = tab.combination < 0 || tab.combination > 1;
  c.check(violates, "combination %.4f lies outside [0, 1]", tab.combination);
  if (tab.combination < 0) c.note("the violation is from below: the combination is negative, not above 1");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else {
      std::fprintf(stderr, "usage: %s [--strict]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::function<Criterion()>> all{nport_statistics, confidence_thresholds, teleportation, third_order,
                                                    swapping,         klm,                   hermite,       pdc_statistics,
                                                    lithography,      entropy};
  int failed = 0;
  for (const auto& f : all) {
    Criterion c = f();
    std::printf("CRITERION %2d %s  %s\n", c.id, c.pass() ? "PASS" : "FAIL", c.title.c_str());
    for (const auto& l : c.lines) std::printf("    [%s] %s\n", l.pass ? "ok" : "!!", l.text.c_str());
    for (const auto& n : c.notes) std::printf("    note: %s\n", n.c_str());
    std::fflush(stdout);
    if (!c.pass()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", int(all.size()) - failed, all.size());
  return strict && failed ? 1 : 0;
}
