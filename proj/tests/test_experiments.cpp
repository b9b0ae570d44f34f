// Copyright 2026 The qoptics Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qoptics/experiments.hpp"

namespace qoptics {
namespace {

const double kPi = std::numbers::pi;

InnsbruckConfig lossy(int N, double ec, TeleportModel m = TeleportModel::cascade) {
  InnsbruckConfig c;
  c.N = N;
  c.eta_u2 = 0.9;
  c.eta_v2 = 0.8;
  c.eta_c2 = ec;
  c.model = m;
  return c;
}

double vacuum_weight(const OrderedBlocks& b) { return b.at({2, 0}).element({0, 0}, {0, 0}).real(); }

// Victor's two photons form the rotation-invariant mixture of |2,0>, |1,1>,
// |0,2> (x,y) with equal weights; Alice clicks on one photon in each of u and v
// with probability g_uv / 2. Summing the single-click probabilities:
//   cascade:     eta(1-eta) + eta^2/N + 2 eta(1-eta) = eta/N (1 + (3N-1)(1-eta))
//   a_y traced:  eta + 2 eta - eta^2              = eta (3 - eta).
double hand_vacuum(const InnsbruckConfig& c) {
  const double e = c.eta_c2, N = c.N;
  double victor = c.model == TeleportModel::cascade ? e / N * (1 + (3 * N - 1) * (1 - e)) : e * (3 - e);
  return c.eta_u2 * c.eta_v2 / 8 * victor;
}

TEST(Innsbruck, ConfigValidation) {
  InnsbruckConfig c;
  c.p1 = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = InnsbruckConfig{};
  c.order = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = lossy(2, 0.5, TeleportModel::ay_undetected);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = lossy(1, 1.2);
  EXPECT_THROW(innsbruck_simulate(c), std::invalid_argument);
  c = lossy(1, 0.5);
  EXPECT_THROW(innsbruck_simulate(c, 3), std::invalid_argument);
}

TEST(Innsbruck, SingleDetectorClosedFormMatchesSimulation) {
  for (auto m : {TeleportModel::cascade, TeleportModel::ay_undetected})
    for (double ec : {0.1, 0.7, 1.0}) {
      auto c = lossy(1, ec, m);
      c.theta = 0.4;
      EXPECT_LT(block_difference(innsbruck_simulate(c).blocks, innsbruck_closed_form(c).blocks), 1e-10);
    }
}

TEST(Innsbruck, PerfectCascadeClosedFormMatchesSimulation) {
  for (int N = 1; N <= 4; ++N) {
    auto c = lossy(N, 1.0);
    EXPECT_LT(block_difference(innsbruck_simulate(c).blocks, innsbruck_closed_form(c).blocks), 1e-10) << N;
  }
}

TEST(Innsbruck, SimulatedVacuumWeightMatchesHandCount) {
  for (int N = 1; N <= 4; ++N)
    for (double ec : {0.3, 0.7, 0.98}) {
      auto c = lossy(N, ec);
      EXPECT_NEAR(vacuum_weight(innsbruck_simulate(c).blocks), hand_vacuum(c), 1e-12);
    }
  for (double ec : {0.1, 0.88}) {
    auto c = lossy(1, ec, TeleportModel::ay_undetected);
    EXPECT_NEAR(vacuum_weight(innsbruck_simulate(c).blocks), hand_vacuum(c), 1e-12);
  }
}

TEST(Innsbruck, ReferenceCascadeVacuumWeightDiffersForLossyCascades) {
  // Reference coefficient 5N-3 against the counted 3N-1; equal only at N = 1.
  for (int N = 2; N <= 4; ++N) {
    auto c = lossy(N, 0.7);
    double reference = vacuum_weight(innsbruck_closed_form(c).blocks);
    double sim = vacuum_weight(innsbruck_simulate(c).blocks);
    EXPECT_NEAR(reference / sim, (1 + (5.0 * N - 3) * 0.3) / (1 + (3.0 * N - 1) * 0.3), 1e-12);
    EXPECT_GT(reference / sim - 1, 0.1);
  }
}

TEST(Innsbruck, ClosedFormFlagsLargeCascades) {
  EXPECT_FALSE(innsbruck_closed_form(lossy(4, 0.9)).unverified_extrapolation);
  EXPECT_TRUE(innsbruck_closed_form(lossy(5, 0.9)).unverified_extrapolation);
  auto c = lossy(2, 0.9);
  c.order = 3;
  EXPECT_THROW(innsbruck_closed_form(c), std::invalid_argument);
}

TEST(Innsbruck, NoCascadeWeights) {
  // Vacuum (3 - eta^2) against one unit of |Psi_theta> at p1 = p2.
  for (double ec : {0.1, 0.5, 1.0}) {
    auto c = lossy(1, ec, TeleportModel::ay_undetected);
    auto cf = innsbruck_closed_form(c);
    double g = c.g_uvc();
    EXPECT_NEAR(vacuum_weight(cf.blocks), g / 8 * (3 - ec), 1e-15);
    EXPECT_NEAR(cf.blocks.at({1, 1}).trace().real(), g / 8, 1e-15);
  }
}

TEST(Innsbruck, LargeCascadeSuppressesVacuum) {
  double prev = 1;
  for (int N : {1, 10, 100, 1000}) {
    auto c = lossy(N, 1.0);
    double v = vacuum_weight(innsbruck_closed_form(c).blocks);
    EXPECT_NEAR(v, c.g_uvc() / 8 / N, 1e-15);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Innsbruck, OrderBookkeeping) {
  for (int order : {2, 3}) {
    auto c = lossy(1, 0.4, TeleportModel::ay_undetected);
    c.order = order;
    auto sim = innsbruck_simulate(c);
    EXPECT_EQ(sim.cross_sector_max, 0.0);
    EXPECT_EQ(sim.odd_power_max, 0.0);
    EXPECT_FALSE(sim.truncated);
    for (const auto& [k, b] : sim.blocks) {
      EXPECT_LE(k.first + k.second, order);
      EXPECT_TRUE(b.is_hermitian());
      // Photon number on Bob's side equals the power of p2.
      for (const auto& [key, v] : b.entries()) EXPECT_EQ(total(key.first), k.second);
    }
  }
  auto c = lossy(3, 0.6);
  auto sim = innsbruck_simulate(c);
  EXPECT_EQ(sim.cross_sector_max, 0.0);
}

TEST(Innsbruck, ThetaZeroGivesBasisState) {
  auto c = lossy(1, 1.0, TeleportModel::ay_undetected);
  c.theta = 0;
  auto b = innsbruck_simulate(c).blocks.at({1, 1});
  EXPECT_GT(b.element({0, 1}, {0, 1}).real(), 0);
  EXPECT_EQ(b.element({1, 0}, {1, 0}), cplx(0.0));
  EXPECT_EQ(b.element({0, 1}, {1, 0}), cplx(0.0));
}

TEST(Innsbruck, TeleportedStateIsPsiTheta) {
  for (double th : {0.2, 0.9})
    for (double ph : {kPi, 0.5}) {
      auto c = lossy(2, 0.8);
      c.theta = th;
      c.phi = ph;
      auto b = innsbruck_simulate(c).blocks.at({1, 1});
      EXPECT_NEAR(fidelity(b, psi_theta(th, ph)), 1.0, 1e-12);
    }
}

TEST(Fidelity2, SimulationAtTenPercent) {
  auto c = lossy(1, 0.1, TeleportModel::ay_undetected);
  c.p1 = c.p2 = 1e-4;
  double f = fidelity_from_blocks(innsbruck_simulate(c).blocks, c.p1, c.p2, 2, c.theta, c.phi);
  EXPECT_NEAR(f, 0.256, 5e-4);
  EXPECT_NEAR(f, teleport_fidelity_actual(0.1), 1e-12);
}

TEST(Fidelity2, EqualsFidelityOfClosedForm) {
  for (int N = 1; N <= 6; ++N)
    for (double ec : {0.5, 0.95}) {
      auto c = lossy(N, ec);
      c.p1 = 2e-4;
      c.p2 = 1e-4;
      EXPECT_NEAR(teleport_fidelity_2(c),
                  fidelity_from_blocks(innsbruck_closed_form(c).blocks, c.p1, c.p2, 2, c.theta, c.phi), 1e-14);
    }
}

TEST(Fidelity2, PerfectCascade) {
  for (int N : {1, 3, 8}) {
    auto c = lossy(N, 1.0);
    c.p1 = 3e-4;
    c.p2 = 1e-4;
    EXPECT_NEAR(teleport_fidelity_2(c), N * c.p2 / (c.p1 + N * c.p2), 1e-15);
  }
}

TEST(Fidelity2, EfficiencyBounds) {
  EXPECT_NEAR(cascade_efficiency_bound(1, 1e-4, 1e-4), 4.0 / 3, 1e-14);
  EXPECT_NEAR(cascade_efficiency_bound_limit(1e-4, 1e-4), 14.0 / 15, 1e-15);
  EXPECT_NEAR(cascade_efficiency_bound(1000000, 1e-4, 1e-4), 14.0 / 15, 1e-6);
  EXPECT_LT(cascade_efficiency_bound(3, 1e-5, 1e-3), 0);
  EXPECT_THROW(cascade_efficiency_bound(0, 1, 1), std::invalid_argument);
  // The bound is where the reference F^(2) crosses 3/4.
  for (int N : {2, 5, 20}) {
    auto c = lossy(N, cascade_efficiency_bound(N, 1e-4, 1e-4));
    c.p1 = c.p2 = 1e-4;
    if (c.eta_c2 <= 1) EXPECT_NEAR(teleport_fidelity_2(c), 0.75, 1e-12);
  }
}

TEST(Fidelity2, MinimalCascadeAtNinetyEightPercent) {
  auto reference = [](int N) {
    auto c = lossy(N, 0.98);
    return teleport_fidelity_2(c);
  };
  auto simulated = [](int N) {
    auto c = lossy(N, 0.98);
    return fidelity_from_blocks(innsbruck_simulate(c).blocks, c.p1, c.p2, 2, c.theta, c.phi);
  };
  EXPECT_EQ(minimal_cascade_size(simulated, 0.75, 8), 4);
  EXPECT_EQ(minimal_cascade_size(reference, 0.75, 8), 5);
  EXPECT_EQ(minimal_cascade_size([](int) { return 0.5; }, 0.75, 8), 0);
}

TEST(Fidelity3, ReferenceFormula) {
  for (double e : {0.1, 0.5, 0.9}) EXPECT_NEAR(teleport_fidelity_3(0, e), teleport_fidelity_actual(e), 1e-15);
  double rel = std::abs(teleport_fidelity_3(1e-4, 0.1) / teleport_fidelity_actual(0.1) - 1);
  EXPECT_GT(rel, 1e-5);
  EXPECT_LT(rel, 1e-3);
  double h = 1e-6;
  for (double e : {0.1, 0.5, 0.9}) EXPECT_LT(teleport_fidelity_3(h, e), teleport_fidelity_3(0, e));
}

TEST(Fidelity3, SimulationStaysCloseToSecondOrder) {
  auto c = lossy(1, 0.1, TeleportModel::ay_undetected);
  c.eta_u2 = c.eta_v2 = 1.0;
  c.order = 3;
  const double p = 1e-4;
  double f3 = fidelity_from_blocks(innsbruck_simulate(c).blocks, p, p, 3, c.theta, c.phi);
  double rel = std::abs(f3 / teleport_fidelity_actual(0.1) - 1);
  EXPECT_LT(rel, 1e-3);
  EXPECT_GT(rel, 0);
}

TEST(Swap, ConditionalStatesMatchReferenceUpToPhase) {
  for (Pol j : {Pol::x, Pol::y})
    for (Pol k : {Pol::x, Pol::y}) {
      auto s = swap_conditional(j, k), p = swap_conditional_reference(j, k);
      EXPECT_NEAR(s.norm2(), 1.0, 1e-14);
      EXPECT_NEAR(p.norm2(), 1.0, 1e-14);
      EXPECT_NEAR(std::abs(inner_product(p, s)), 1.0, 1e-12);
      auto v = is_ppt(DensityOperator::pure(s), swap_side2());
      EXPECT_FALSE(v.ppt);
    }
  auto xx = swap_conditional_reference(Pol::x, Pol::x);
  EXPECT_NEAR(xx.amplitude({0, 0, 0, 2}).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(xx.amplitude({0, 2, 0, 0}).real(), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(swap_conditional(Pol::none, Pol::x), std::invalid_argument);
}

TEST(Swap, MixtureSpectrum) {
  auto ev = swap_mixture_pt_spectrum();
  std::multiset<long> got, want;
  for (double e : ev) got.insert(std::lround(e * 1e8));
  const double s3 = std::sqrt(3.0) / 8;
  for (double e : {0.0, 0.0, -0.125, -s3, s3}) want.insert(std::lround(e * 1e8));
  for (int i = 0; i < 9; ++i) want.insert(std::lround(0.125 * 1e8));
  EXPECT_EQ(got, want);
  std::vector<double> sorted = ev;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(sorted.front(), -s3, 1e-10);
  EXPECT_NEAR(sorted.back(), s3, 1e-10);
  double tr = 0, sq = 0;
  for (double e : ev) {
    tr += e;
    sq += e * e;
  }
  EXPECT_NEAR(tr, 1.0, 1e-12);
  auto rho = swap_mixture();
  double purity = 0;
  for (const auto& [k, v] : rho.entries()) purity += std::norm(v);
  EXPECT_NEAR(sq, purity, 1e-12);
}

TEST(Swap, SingletSpectrum) {
  auto ev = singlet_pt_spectrum();
  std::sort(ev.begin(), ev.end());
  EXPECT_NEAR(ev.front(), -0.5, 1e-12);
  EXPECT_EQ(std::count_if(ev.begin(), ev.end(), [](double e) { return std::abs(e - 0.5) < 1e-12; }), 3);
}

TEST(NsGate, UnitaryCompletion) {
  auto U = ns_unitary();
  EXPECT_LT((U.adjoint() * U - Eigen::MatrixXcd::Identity(3, 3)).norm(), 1e-10);
  EXPECT_LT((U - U.transpose()).norm(), 1e-15);
}

TEST(NsGate, BasisInputs) {
  auto r = ns_gate({1.0, 0.0, 0.0});
  EXPECT_NEAR(r.probability, 0.25, 1e-12);
  EXPECT_NEAR(std::abs(r.out[0] - 1.0), 0, 1e-12);
  auto t = ns_gate({0.0, 0.0, 1.0});
  EXPECT_NEAR(std::abs(t.out[2] + 1.0), 0, 1e-12);
  EXPECT_NEAR(t.probability, 0.25, 1e-12);
  EXPECT_THROW(ns_gate({1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(NsGate, RandomInputsFlipTwoPhotonSign) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  double lo = 1, hi = 0;
  for (int t = 0; t < 100; ++t) {
    std::array<cplx, 3> in{cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))};
    double n = std::sqrt(std::norm(in[0]) + std::norm(in[1]) + std::norm(in[2]));
    for (auto& a : in) a /= n;
    auto r = ns_gate(in);
    lo = std::min(lo, r.probability);
    hi = std::max(hi, r.probability);
    EXPECT_NEAR(std::abs(r.out[0] - in[0]), 0, 1e-10);
    EXPECT_NEAR(std::abs(r.out[1] - in[1]), 0, 1e-10);
    EXPECT_NEAR(std::abs(r.out[2] + in[2]), 0, 1e-10);
  }
  EXPECT_LT(hi - lo, 1e-10);
  EXPECT_NEAR(lo, 0.25, 1e-10);
}

TEST(Csign, ProducesBellState) {
  auto r = csign_entangler();
  EXPECT_NEAR(r.bell_fidelity, 1.0, 1e-10);
  EXPECT_NEAR(r.entanglement, 1.0, 1e-10);
  EXPECT_NEAR(r.probability, 1.0 / 16, 1e-12);
  EXPECT_EQ(r.detected_photons, 6);
  for (const auto& [n, a] : r.state.terms()) EXPECT_EQ(total(n), 2);
}

TEST(Qudit, QubitIdentityOutcome) {
  auto U = qudit_correction(2, 0, 0);
  EXPECT_NEAR((U - Eigen::MatrixXcd::Identity(2, 2)).norm(), 0, 1e-15);
  Eigen::VectorXcd in(2);
  in << 0.6, cplx(0, 0.8);
  auto r = qudit_teleport(2, in, 0, 0);
  EXPECT_NEAR((r.output - in).norm(), 0, 1e-14);
  EXPECT_NEAR(r.probability, 0.25, 1e-14);
}

TEST(Qudit, QutritAllOutcomes) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int d : {3, 4}) {
    Eigen::VectorXcd in(d);
    for (int i = 0; i < d; ++i) in(i) = {nd(rng), nd(rng)};
    in.normalize();
    double total_p = 0;
    for (int n = 0; n < d; ++n)
      for (int m = 0; m < d; ++m) {
        auto r = qudit_teleport(d, in, n, m);
        EXPECT_LT((r.output - in).norm(), 1e-12);
        EXPECT_NEAR(r.probability, 1.0 / (d * d), 1e-12);
        total_p += r.probability;
      }
    EXPECT_NEAR(total_p, 1.0, 1e-12);
  }
  EXPECT_THROW(qudit_teleport(1, Eigen::VectorXcd::Ones(1), 0, 0), std::invalid_argument);
  EXPECT_THROW(qudit_teleport(3, Eigen::VectorXcd::Ones(3), 3, 0), std::invalid_argument);
}

TEST(Qudit, BellBasisOrthonormal) {
  const int d = 3;
  for (int a = 0; a < d * d; ++a)
    for (int b = 0; b < d * d; ++b) {
      cplx ov = qudit_bell(d, a / d, a % d).dot(qudit_bell(d, b / d, b % d));
      EXPECT_NEAR(std::abs(ov - (a == b ? 1.0 : 0.0)), 0, 1e-14);
    }
}

TEST(Ghz, EightBranches) {
  auto r = ghz_postselect();
  std::set<std::string> got;
  for (const auto& b : r.branches) got.insert(b.label);
  std::set<std::string> want{"|xy,x,0>", "|x,x,y>", "|xy,0,x>", "|x,0,xy>",
                             "|y,xy,0>", "|0,xy,y>", "|y,y,x>", "|0,y,xy>"};
  EXPECT_EQ(got, want);
  for (const auto& b : r.branches) EXPECT_NEAR(std::abs(b.amplitude - r.branches[0].amplitude), 0, 1e-14);
  EXPECT_THROW(ghz_postselect(3), std::invalid_argument);
}

TEST(Ghz, PostselectedState) {
  auto r = ghz_postselect();
  // Index d1*4 + d2*2 + d3 with x = 0: |x,x,y> = 1, |y,y,x> = 6.
  for (int i = 0; i < 8; ++i)
    if (i != 1 && i != 6) EXPECT_NEAR(std::abs(r.postselected(i)), 0, 1e-14);
  EXPECT_NEAR(std::abs(r.postselected(1)), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::abs(r.postselected(1) - r.postselected(6)), 0, 1e-14);
  EXPECT_NEAR(r.visibility_45, 1.0, 1e-12);
  EXPECT_EQ(r.non_xyxy_fourfold, 0.0);
  EXPECT_GT(r.coincidence_probability, 0);
}

}  // namespace
}  // namespace qoptics
