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

#ifndef QOPTICS_OPTIMIZER_HPP
#define QOPTICS_OPTIMIZER_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace qoptics::de {

using Vector = std::vector<double>;
using Objective = std::function<double(const Vector&)>;

struct DEConfig {
  std::size_t n = 1;
  std::size_t NP = 0;  // 0 means 10 n
  double F = 0.5;
  double CR = 0.1;
  int gen_max = 1000;
  std::uint64_t seed = 1;
  Vector init_lo;  // per parameter; empty means -1
  Vector init_hi;  // per parameter; empty means +1
  std::vector<std::size_t> normalize;  // genes rescaled to unit norm before scoring

  std::size_t population() const { return NP ? NP : 10 * n; }

  void validate() const {
    if (n < 1) throw std::invalid_argument("n >= 1 required");
    if (population() < 4) throw std::invalid_argument("NP >= 4 required");
    if (!(F > 0)) throw std::invalid_argument("F > 0 required");
    if (!(CR >= 0 && CR <= 1)) throw std::invalid_argument("CR must lie in [0,1]");
    if (gen_max < 0) throw std::invalid_argument("gen_max >= 0 required");
    if ((!init_lo.empty() && init_lo.size() != n) || (!init_hi.empty() && init_hi.size() != n))
      throw std::invalid_argument("init range size mismatch");
    for (auto g : normalize)
      if (g >= n) throw std::invalid_argument("normalised gene out of range");
  }

  double lo(std::size_t j) const { return init_lo.empty() ? -1.0 : init_lo[j]; }
  double hi(std::size_t j) const { return init_hi.empty() ? 1.0 : init_hi[j]; }
};

/// Litho preset: amplitude genes in [-1, 1], exposure time in [0, 0.01].
inline DEConfig litho_preset(std::size_t n = 21, std::uint64_t seed = 1) {
  DEConfig c;
  c.n = n;
  c.seed = seed;
  c.init_lo.assign(n, -1.0);
  c.init_hi.assign(n, 1.0);
  c.init_lo.back() = 0.0;
  c.init_hi.back() = 1e-2;
  for (std::size_t j = 0; j + 1 < n; ++j) c.normalize.push_back(j);
  return c;
}

inline Vector normalize_genes(Vector v, const std::vector<std::size_t>& subset) {
  if (subset.empty()) return v;
  double s = 0;
  for (auto j : subset) {
    if (j >= v.size()) throw std::invalid_argument("gene index out of range");
    s += v[j] * v[j];
  }
  if (!(s > 0)) throw std::domain_error("zero norm in normalised genes");
  s = std::sqrt(s);
  for (auto j : subset) v[j] /= s;
  return v;
}

struct Individual {
  Vector x;
  double cost = std::numeric_limits<double>::infinity();
};

struct Generation {
  int gen;
  double best_so_far;
  double population_min;
};

struct DEResult {
  Vector best;
  double best_cost;
  std::vector<Generation> history;
  std::vector<Individual> population;  // final
};

/// Stream 0 seeds initialisation, stream 1 the evolution.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq ss{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(id), std::uint32_t(id >> 32)};
  return std::mt19937_64(ss);
}

inline double score(const Objective& f, Vector& x, const DEConfig& cfg) {
  if (!cfg.normalize.empty()) {
    double s = 0;
    for (auto j : cfg.normalize) s += x[j] * x[j];
    if (!(s > 0)) return std::numeric_limits<double>::infinity();
    x = normalize_genes(std::move(x), cfg.normalize);
  }
  double c = f(x);
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

inline std::vector<Individual> init_population(const DEConfig& cfg) {
  cfg.validate();
  auto rng = stream(cfg.seed, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Individual> pop(cfg.population());
  for (auto& ind : pop) {
    ind.x.resize(cfg.n);
    for (std::size_t j = 0; j < cfg.n; ++j) ind.x[j] = cfg.lo(j) + (cfg.hi(j) - cfg.lo(j)) * u(rng);
  }
  return pop;
}

/// rand/1/bin with a random starting gene, the last visited gene always taken
/// from the mutant, greedy selection on <= and synchronous generations.
inline DEResult de_minimize(const DEConfig& cfg, const Objective& f) {
  auto pop = init_population(cfg);
  for (auto& ind : pop) ind.cost = score(f, ind.x, cfg);
  const std::size_t NP = pop.size(), n = cfg.n;

  DEResult r;
  r.best_cost = std::numeric_limits<double>::infinity();
  auto record = [&](int gen) {
    double pmin = std::numeric_limits<double>::infinity();
    for (const auto& ind : pop) {
      pmin = std::min(pmin, ind.cost);
      if (ind.cost < r.best_cost) {
        r.best_cost = ind.cost;
        r.best = ind.x;
      }
    }
    r.history.push_back({gen, r.best_cost, pmin});
  };
  record(0);

  auto rng = stream(cfg.seed, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, NP - 1), start(0, n - 1);
  std::vector<Individual> next(NP);
  Vector trial(n);
  for (int gen = 1; gen <= cfg.gen_max; ++gen) {
    for (std::size_t i = 0; i < NP; ++i) {
      std::size_t a, b, c;
      do a = pick(rng); while (a == i);
      do b = pick(rng); while (b == i || b == a);
      do c = pick(rng); while (c == i || c == a || c == b);
      std::size_t j = start(rng);
      for (std::size_t k = 1; k <= n; ++k) {
        if (u(rng) <= cfg.CR || k == n)
          trial[j] = pop[c].x[j] + cfg.F * (pop[a].x[j] - pop[b].x[j]);
        else
          trial[j] = pop[i].x[j];
        j = (j + 1) % n;
      }
      Vector t = trial;
      double s = score(f, t, cfg);
      if (std::isfinite(s) && s <= pop[i].cost)
        next[i] = {std::move(t), s};
      else
        next[i] = pop[i];
    }
    pop.swap(next);
    record(gen);
  }
  r.population = std::move(pop);
  return r;
}

}  // namespace qoptics::de

#endif  // QOPTICS_OPTIMIZER_HPP
