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

#ifndef QOPTICS_FOCKCORE_HPP
#define QOPTICS_FOCKCORE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qoptics {

using cplx = std::complex<double>;
using Occupation = std::vector<int>;

inline constexpr double kPruneTol = 1e-15;
inline constexpr double kUnitaryTol = 1e-12;

enum class Pol : std::uint8_t { x, y, none };

struct ModeLabel {
  int spatial = 0;
  Pol pol = Pol::none;

  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

inline std::string to_string(const ModeLabel& m) {
  std::string s = std::to_string(m.spatial);
  if (m.pol == Pol::x) s += 'x';
  if (m.pol == Pol::y) s += 'y';
  return s;
}

inline int total(const Occupation& n) { return std::accumulate(n.begin(), n.end(), 0); }

inline double factorial(int n) { return std::tgamma(n + 1.0); }

/// Ordered list of distinct mode labels. Declaration order fixes the layout of
/// every occupation vector built on the register.
class Register {
 public:
  Register() = default;
  explicit Register(std::vector<ModeLabel> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("register needs at least one mode");
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("duplicate mode label");
  }

  static Register numbered(int n) {
    std::vector<ModeLabel> l;
    for (int i = 0; i < n; ++i) l.push_back({i, Pol::none});
    return Register(std::move(l));
  }

  /// Spatial modes 0..n-1, each split into x and y polarisation (x first).
  static Register polarized(int n) {
    std::vector<ModeLabel> l;
    for (int i = 0; i < n; ++i) {
      l.push_back({i, Pol::x});
      l.push_back({i, Pol::y});
    }
    return Register(std::move(l));
  }

  std::size_t size() const { return labels_.size(); }
  const ModeLabel& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<ModeLabel>& labels() const { return labels_; }

  bool contains(const ModeLabel& m) const {
    return std::find(labels_.begin(), labels_.end(), m) != labels_.end();
  }

  std::size_t index(const ModeLabel& m) const {
    auto it = std::find(labels_.begin(), labels_.end(), m);
    if (it == labels_.end()) throw std::out_of_range("unknown mode label " + to_string(m));
    return static_cast<std::size_t>(it - labels_.begin());
  }

  friend bool operator==(const Register&, const Register&) = default;

 private:
  std::vector<ModeLabel> labels_;
};

/// Sparse ket over occupation vectors with a total-photon cutoff. Terms that
/// would exceed the cutoff are dropped and the state is flagged truncated.
class OccupationState {
 public:
  using Map = std::map<Occupation, cplx>;

  OccupationState() = default;
  OccupationState(Register reg, int cutoff) : reg_(std::move(reg)), cutoff_(cutoff) {
    if (cutoff < 0) throw std::invalid_argument("negative cutoff");
  }

  static OccupationState vacuum(Register reg, int cutoff) {
    OccupationState s(std::move(reg), cutoff);
    s.add(Occupation(s.reg_.size(), 0), 1.0);
    return s;
  }

  static OccupationState basis(Register reg, int cutoff, const Occupation& n, cplx amp = 1.0) {
    OccupationState s(std::move(reg), cutoff);
    s.add(n, amp);
    return s;
  }

  const Register& reg() const { return reg_; }
  int cutoff() const { return cutoff_; }
  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }
  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  cplx amplitude(const Occupation& n) const {
    auto it = terms_.find(n);
    return it == terms_.end() ? cplx{} : it->second;
  }

  void add(const Occupation& n, cplx amp) {
    if (n.size() != reg_.size()) throw std::invalid_argument("occupation length mismatch");
    if (std::any_of(n.begin(), n.end(), [](int k) { return k < 0; }))
      throw std::invalid_argument("negative occupation");
    if (total(n) > cutoff_) {
      if (std::abs(amp) > kPruneTol) truncated_ = true;
      return;
    }
    auto [it, fresh] = terms_.try_emplace(n, amp);
    if (!fresh) it->second += amp;
    if (std::abs(it->second) <= kPruneTol) terms_.erase(it);
  }

  double norm2() const {
    double s = 0;
    for (const auto& [n, a] : terms_) s += std::norm(a);
    return s;
  }

  OccupationState normalized() const {
    double nn = norm2();
    if (nn <= 0) throw std::domain_error("cannot normalise the zero state");
    OccupationState out = *this;
    out *= 1.0 / std::sqrt(nn);
    return out;
  }

  OccupationState& operator*=(cplx c) {
    Map m;
    for (const auto& [n, a] : terms_)
      if (std::abs(a * c) > kPruneTol) m.emplace(n, a * c);
    terms_ = std::move(m);
    return *this;
  }

  OccupationState& operator+=(const OccupationState& o) {
    if (!(o.reg_ == reg_) || o.cutoff_ != cutoff_) throw std::invalid_argument("register mismatch");
    for (const auto& [n, a] : o.terms_) add(n, a);
    truncated_ = truncated_ || o.truncated_;
    return *this;
  }

  friend OccupationState operator+(OccupationState a, const OccupationState& b) { return a += b; }
  friend OccupationState operator*(cplx c, OccupationState s) { return s *= c; }

 private:
  Register reg_;
  int cutoff_ = 0;
  bool truncated_ = false;
  Map terms_;
};

inline OccupationState apply_creation(const OccupationState& s, std::size_t mode) {
  if (mode >= s.reg().size()) throw std::out_of_range("unknown mode index");
  OccupationState out(s.reg(), s.cutoff());
  if (s.truncated()) out.mark_truncated();
  for (const auto& [n, a] : s.terms()) {
    Occupation m = n;
    m[mode] += 1;
    out.add(m, a * std::sqrt(double(m[mode])));
  }
  return out;
}

inline OccupationState apply_creation(const OccupationState& s, const ModeLabel& m) {
  return apply_creation(s, s.reg().index(m));
}

inline OccupationState apply_annihilation(const OccupationState& s, std::size_t mode) {
  if (mode >= s.reg().size()) throw std::out_of_range("unknown mode index");
  OccupationState out(s.reg(), s.cutoff());
  if (s.truncated()) out.mark_truncated();
  for (const auto& [n, a] : s.terms()) {
    if (n[mode] == 0) continue;
    Occupation m = n;
    m[mode] -= 1;
    out.add(m, a * std::sqrt(double(n[mode])));
  }
  return out;
}

inline OccupationState apply_annihilation(const OccupationState& s, const ModeLabel& m) {
  return apply_annihilation(s, s.reg().index(m));
}

inline cplx inner_product(const OccupationState& lhs, const OccupationState& rhs) {
  if (!(lhs.reg() == rhs.reg()) || lhs.cutoff() != rhs.cutoff())
    throw std::invalid_argument("register mismatch");
  cplx s{};
  const auto& small = lhs.size() <= rhs.size() ? lhs : rhs;
  const auto& large = lhs.size() <= rhs.size() ? rhs : lhs;
  for (const auto& [n, a] : small.terms()) {
    cplx b = large.amplitude(n);
    if (b == cplx{}) continue;
    s += (&small == &lhs) ? std::conj(a) * b : std::conj(b) * a;
  }
  return s;
}

inline bool is_unitary(const Eigen::MatrixXcd& U, double tol = kUnitaryTol) {
  if (U.rows() != U.cols()) return false;
  auto d = U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

/// Passive linear map on the listed modes: a_j^dag -> sum_i U(i,j) a_i^dag,
/// where i and j index into `modes`.
inline OccupationState apply_passive_unitary(const OccupationState& s,
                                             const std::vector<std::size_t>& modes,
                                             const Eigen::MatrixXcd& U) {
  const std::size_t k = modes.size();
  if (U.rows() != Eigen::Index(k) || U.cols() != Eigen::Index(k))
    throw std::invalid_argument("unitary size does not match mode list");
  if (!is_unitary(U)) throw std::invalid_argument("matrix is not unitary");
  for (auto m : modes)
    if (m >= s.reg().size()) throw std::out_of_range("unknown mode index");

  // Expansion of each sub-occupation is shared between terms.
  std::map<Occupation, std::vector<std::pair<Occupation, cplx>>> cache;
  auto expand = [&](const Occupation& sub) -> const std::vector<std::pair<Occupation, cplx>>& {
    auto it = cache.find(sub);
    if (it != cache.end()) return it->second;
    double pref = 1.0;
    for (int v : sub) pref /= std::sqrt(factorial(v));
    std::map<Occupation, cplx> mono{{Occupation(k, 0), pref}};
    for (std::size_t j = 0; j < k; ++j) {
      for (int rep = 0; rep < sub[j]; ++rep) {
        std::map<Occupation, cplx> next;
        for (const auto& [o, c] : mono) {
          for (std::size_t i = 0; i < k; ++i) {
            cplx u = U(i, j);
            if (std::abs(u) < kPruneTol) continue;
            Occupation o2 = o;
            o2[i] += 1;
            next[o2] += c * u;
          }
        }
        mono = std::move(next);
      }
    }
    std::vector<std::pair<Occupation, cplx>> res;
    for (const auto& [o, c] : mono) {
      double f = 1.0;
      for (int v : o) f *= std::sqrt(factorial(v));
      if (std::abs(c * f) > kPruneTol) res.emplace_back(o, c * f);
    }
    return cache.emplace(sub, std::move(res)).first->second;
  };

  OccupationState out(s.reg(), s.cutoff());
  if (s.truncated()) out.mark_truncated();
  for (const auto& [n, a] : s.terms()) {
    Occupation sub(k);
    for (std::size_t j = 0; j < k; ++j) sub[j] = n[modes[j]];
    Occupation base = n;
    for (auto m : modes) base[m] = 0;
    for (const auto& [o, c] : expand(sub)) {
      Occupation t = base;
      for (std::size_t i = 0; i < k; ++i) t[modes[i]] = o[i];
      out.add(t, a * c);
    }
  }
  return out;
}

inline OccupationState apply_passive_unitary(const OccupationState& s,
                                             const std::vector<ModeLabel>& modes,
                                             const Eigen::MatrixXcd& U) {
  std::vector<std::size_t> idx;
  for (const auto& m : modes) idx.push_back(s.reg().index(m));
  return apply_passive_unitary(s, idx, U);
}

inline OccupationState apply_passive_unitary(const OccupationState& s, const Eigen::MatrixXcd& U) {
  std::vector<std::size_t> idx(s.reg().size());
  std::iota(idx.begin(), idx.end(), 0);
  return apply_passive_unitary(s, idx, U);
}

/// Operator on the truncated space, stored as (ket, bra) -> element.
class DensityOperator {
 public:
  using Key = std::pair<Occupation, Occupation>;
  using Map = std::map<Key, cplx>;

  DensityOperator() = default;
  DensityOperator(Register reg, int cutoff) : reg_(std::move(reg)), cutoff_(cutoff) {}

  static DensityOperator pure(const OccupationState& s) {
    DensityOperator r(s.reg(), s.cutoff());
    for (const auto& [n, a] : s.terms())
      for (const auto& [m, b] : s.terms()) r.add(n, m, a * std::conj(b));
    return r;
  }

  const Register& reg() const { return reg_; }
  int cutoff() const { return cutoff_; }
  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  void add(const Occupation& ket, const Occupation& bra, cplx v) {
    if (ket.size() != reg_.size() || bra.size() != reg_.size())
      throw std::invalid_argument("occupation length mismatch");
    if (total(ket) > cutoff_ || total(bra) > cutoff_) return;
    auto [it, fresh] = entries_.try_emplace(Key{ket, bra}, v);
    if (!fresh) it->second += v;
    if (std::abs(it->second) <= kPruneTol) entries_.erase(it);
  }

  cplx element(const Occupation& ket, const Occupation& bra) const {
    auto it = entries_.find(Key{ket, bra});
    return it == entries_.end() ? cplx{} : it->second;
  }

  cplx trace() const {
    cplx t{};
    for (const auto& [k, v] : entries_)
      if (k.first == k.second) t += v;
    return t;
  }

  bool is_hermitian(double tol = kUnitaryTol) const {
    for (const auto& [k, v] : entries_)
      if (std::abs(v - std::conj(element(k.second, k.first))) > tol) return false;
    return true;
  }

  DensityOperator& operator*=(cplx c) {
    for (auto& [k, v] : entries_) v *= c;
    return *this;
  }

  DensityOperator& operator+=(const DensityOperator& o) {
    if (!(o.reg_ == reg_)) throw std::invalid_argument("register mismatch");
    for (const auto& [k, v] : o.entries_) add(k.first, k.second, v);
    return *this;
  }

  friend DensityOperator operator+(DensityOperator a, const DensityOperator& b) { return a += b; }
  friend DensityOperator operator*(cplx c, DensityOperator r) { return r *= c; }

  DensityOperator normalized() const {
    double t = trace().real();
    if (!(t > 0)) throw std::domain_error("cannot normalise an operator with non-positive trace");
    DensityOperator out = *this;
    out *= 1.0 / t;
    return out;
  }

  /// Sorted union of every occupation that appears as a ket or a bra.
  std::vector<Occupation> basis() const {
    std::vector<Occupation> b;
    for (const auto& [k, v] : entries_) {
      b.push_back(k.first);
      b.push_back(k.second);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  Eigen::MatrixXcd to_dense(const std::vector<Occupation>& basis) const {
    std::map<Occupation, Eigen::Index> pos;
    for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = Eigen::Index(i);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(Eigen::Index(basis.size()), Eigen::Index(basis.size()));
    for (const auto& [k, v] : entries_) {
      auto a = pos.find(k.first), b = pos.find(k.second);
      if (a == pos.end() || b == pos.end()) throw std::invalid_argument("basis misses an occupation");
      M(a->second, b->second) = v;
    }
    return M;
  }

  /// Ascending eigenvalues on the support; requires Hermiticity.
  std::vector<double> eigenvalues() const {
    if (!is_hermitian(1e-10)) throw std::domain_error("operator is not Hermitian");
    auto b = basis();
    if (b.empty()) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense(b), Eigen::EigenvaluesOnly);
    auto ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
  }

 private:
  Register reg_;
  int cutoff_ = 0;
  Map entries_;
};

inline std::vector<std::size_t> indices_of(const Register& reg, const std::vector<ModeLabel>& modes) {
  std::vector<std::size_t> idx;
  for (const auto& m : modes) idx.push_back(reg.index(m));
  return idx;
}

/// Trace over every mode not in `keep`. Kept modes retain register order.
inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<ModeLabel>& keep) {
  if (keep.empty()) throw std::invalid_argument("empty keep set");
  auto idx = indices_of(rho.reg(), keep);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<bool> kept(rho.reg().size(), false);
  std::vector<ModeLabel> labels;
  for (auto i : idx) {
    kept[i] = true;
    labels.push_back(rho.reg()[i]);
  }
  DensityOperator out(Register(labels), rho.cutoff());
  for (const auto& [k, v] : rho.entries()) {
    bool match = true;
    for (std::size_t i = 0; i < kept.size() && match; ++i)
      if (!kept[i] && k.first[i] != k.second[i]) match = false;
    if (!match) continue;
    Occupation a, b;
    for (auto i : idx) {
      a.push_back(k.first[i]);
      b.push_back(k.second[i]);
    }
    out.add(a, b, v);
  }
  return out;
}

}  // namespace qoptics

#endif  // QOPTICS_FOCKCORE_HPP
