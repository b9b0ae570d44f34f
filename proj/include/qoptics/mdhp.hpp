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

#ifndef QOPTICS_MDHP_HPP
#define QOPTICS_MDHP_HPP

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "qoptics/fockcore.hpp"

// Complex multi-dimensional Hermite polynomials
//   H^B_n(alpha) = (-1)^|n| exp(1/2 (alpha,B alpha)) d^n exp(-1/2 (alpha,B alpha))
// with a complex symmetric defining matrix B (no conjugation in (.,.)).

namespace qoptics::mdhp {

using MultiIndex = std::vector<int>;

inline constexpr int kDefaultMaxDegree = 12;

inline void check_symmetric(const Eigen::MatrixXcd& B) {
  if (B.rows() != B.cols()) throw std::invalid_argument("defining matrix must be square");
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > kUnitaryTol)
    throw std::invalid_argument("defining matrix must be symmetric");
}

namespace detail {

struct Evaluator {
  const Eigen::MatrixXcd& B;
  const Eigen::VectorXcd& alpha;
  Eigen::VectorXcd Balpha;
  std::map<MultiIndex, cplx> memo;

  Evaluator(const Eigen::MatrixXcd& b, const Eigen::VectorXcd& a) : B(b), alpha(a), Balpha(b * a) {}

  cplx operator()(const MultiIndex& n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    std::size_t i = 0;
    while (i < n.size() && n[i] == 0) ++i;
    cplx v;
    if (i == n.size()) {
      v = 1.0;
    } else {
      // H_{m+e_i} = sum_j B_ij alpha_j H_m - sum_j B_ij m_j H_{m-e_j}
      MultiIndex m = n;
      m[i] -= 1;
      v = Balpha(Eigen::Index(i)) * (*this)(m);
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] == 0 || B(Eigen::Index(i), Eigen::Index(j)) == cplx{}) continue;
        MultiIndex r = m;
        r[j] -= 1;
        v -= B(Eigen::Index(i), Eigen::Index(j)) * double(m[j]) * (*this)(r);
      }
    }
    memo.emplace(n, v);
    return v;
  }
};

inline cplx matching_sum(const Eigen::MatrixXcd& B, std::vector<int>& idx, std::vector<bool>& used,
                         std::size_t first) {
  while (first < idx.size() && used[first]) ++first;
  if (first == idx.size()) return 1.0;
  used[first] = true;
  cplx s{};
  for (std::size_t k = first + 1; k < idx.size(); ++k) {
    if (used[k]) continue;
    cplx w = -B(idx[first], idx[k]);
    if (w == cplx{}) continue;
    used[k] = true;
    s += w * matching_sum(B, idx, used, first + 1);
    used[k] = false;
  }
  used[first] = false;
  return s;
}

}  // namespace detail

inline cplx evaluate(const Eigen::MatrixXcd& B, const MultiIndex& n, const Eigen::VectorXcd& alpha,
                     int max_degree = kDefaultMaxDegree) {
  check_symmetric(B);
  if (Eigen::Index(n.size()) != B.rows() || alpha.size() != B.rows())
    throw std::invalid_argument("dimension mismatch");
  if (total(n) > max_degree) throw std::invalid_argument("degree exceeds the configured maximum");
  detail::Evaluator ev(B, alpha);
  return ev(n);
}

/// Perfect-matching (Wick) evaluation at alpha = 0, weights -B_ij.
inline cplx evaluate_at_zero(const Eigen::MatrixXcd& B, const MultiIndex& n) {
  check_symmetric(B);
  if (Eigen::Index(n.size()) != B.rows()) throw std::invalid_argument("dimension mismatch");
  if (total(n) % 2) return 0.0;
  std::vector<int> idx;
  for (std::size_t i = 0; i < n.size(); ++i)
    for (int k = 0; k < n[i]; ++k) idx.push_back(int(i));
  std::vector<bool> used(idx.size(), false);
  return detail::matching_sum(B, idx, used, 0);
}

/// H_{n+e_i}(alpha) from the three-term recursion.
inline cplx recursion_step(const Eigen::MatrixXcd& B, const MultiIndex& n, std::size_t i,
                           const Eigen::VectorXcd& alpha) {
  cplx v{};
  for (Eigen::Index j = 0; j < B.rows(); ++j) v += B(Eigen::Index(i), j) * alpha(j);
  v *= evaluate(B, n, alpha);
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] == 0) continue;
    MultiIndex r = n;
    r[j] -= 1;
    v -= B(Eigen::Index(i), Eigen::Index(j)) * double(n[j]) * evaluate(B, r, alpha);
  }
  return v;
}

/// Right-hand side of d/d alpha_i H_n = sum_j B_ij n_j H_{n-e_j}.
inline cplx derivative_rhs(const Eigen::MatrixXcd& B, const MultiIndex& n, std::size_t i,
                           const Eigen::VectorXcd& alpha) {
  cplx v{};
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] == 0) continue;
    MultiIndex r = n;
    r[j] -= 1;
    v += B(Eigen::Index(i), Eigen::Index(j)) * double(n[j]) * evaluate(B, r, alpha);
  }
  return v;
}

/// Relative residual of the differential recursion, left side by a fourth-order
/// central difference of the polynomial along alpha_i.
inline double recursion_differential(const Eigen::MatrixXcd& B, const MultiIndex& n, std::size_t i,
                                     const Eigen::VectorXcd& alpha, double h = 1e-3) {
  auto at = [&](double dx) {
    Eigen::VectorXcd a = alpha;
    a(Eigen::Index(i)) += dx;
    return evaluate(B, n, a);
  };
  cplx lhs = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12 * h);
  cplx rhs = derivative_rhs(B, n, i, alpha);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

/// Sum_{|n| <= max_degree} beta^n / n! H_n(alpha).
inline cplx generating_function_truncated(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& alpha,
                                          const Eigen::VectorXcd& beta, int max_degree) {
  const auto d = std::size_t(B.rows());
  detail::Evaluator ev(B, alpha);
  cplx s{};
  MultiIndex n(d, 0);
  std::function<void(std::size_t, int)> walk = [&](std::size_t pos, int left) {
    if (pos == d) {
      cplx term = ev(n);
      for (std::size_t i = 0; i < d; ++i)
        term *= std::pow(beta(Eigen::Index(i)), n[i]) / factorial(n[i]);
      s += term;
      return;
    }
    for (int k = 0; k <= left; ++k) {
      n[pos] = k;
      walk(pos + 1, left - k);
    }
    n[pos] = 0;
  };
  walk(0, max_degree);
  return s;
}

inline cplx generating_function(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& alpha,
                                const Eigen::VectorXcd& beta) {
  cplx ab = (alpha.transpose() * B * beta)(0, 0);
  cplx bb = (beta.transpose() * B * beta)(0, 0);
  return std::exp(ab - 0.5 * bb);
}

/// Ryser's formula.
inline double permanent(const Eigen::MatrixXd& M) {
  const int k = int(M.rows());
  if (k == 0) return 1.0;
  double s = 0;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    double prod = 1;
    for (int i = 0; i < k; ++i) {
      double row = 0;
      for (int j = 0; j < k; ++j)
        if (mask & (1u << j)) row += M(i, j);
      prod *= row;
    }
    s += ((k - std::popcount(mask)) % 2 ? -1.0 : 1.0) * prod;
  }
  return s;
}

inline void check_positive_definite(const Eigen::MatrixXd& B) {
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > kUnitaryTol)
    throw std::invalid_argument("defining matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("defining matrix is not positive definite");
}

/// Integral over R^d of exp(-1/2 (x,Bx)) H_n(x)^2 for real positive definite B:
/// (2 pi)^{d/2} det(B)^{-1/2} perm(B[n,n]), where B[n,n] repeats row/column i
/// n_i times.
inline double orthogonality_norm(const Eigen::MatrixXd& B, const MultiIndex& n) {
  check_positive_definite(B);
  if (Eigen::Index(n.size()) != B.rows()) throw std::invalid_argument("dimension mismatch");
  std::vector<int> idx;
  for (std::size_t i = 0; i < n.size(); ++i)
    for (int k = 0; k < n[i]; ++k) idx.push_back(int(i));
  Eigen::MatrixXd Bn(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) Bn(Eigen::Index(a), Eigen::Index(b)) = B(idx[a], idx[b]);
  const double d = double(B.rows());
  return std::pow(2 * std::numbers::pi, d / 2) / std::sqrt(B.determinant()) * permanent(Bn);
}

struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch nodes and weights for the weight exp(-x^2).
inline GaussHermite gauss_hermite(int m) {
  if (m < 1) throw std::invalid_argument("need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermite g;
  for (int k = 0; k < m; ++k) {
    g.nodes.push_back(es.eigenvalues()(k));
    double v = es.eigenvectors()(0, k);
    g.weights.push_back(std::sqrt(std::numbers::pi) * v * v);
  }
  return g;
}

/// Tensor Gauss-Hermite quadrature of exp(-1/2 (x,Bx)) H_n(x)^2, d <= 2.
inline double orthogonality_quadrature(const Eigen::MatrixXd& B, const MultiIndex& n, int nodes = 40) {
  check_positive_definite(B);
  const auto d = B.rows();
  if (d > 2) throw std::invalid_argument("quadrature limited to d <= 2");
  Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(B).matrixL();
  Eigen::MatrixXd LTinv = L.transpose().inverse();
  auto g = gauss_hermite(nodes);
  const Eigen::MatrixXcd Bc = B.cast<cplx>();
  double jac = std::pow(std::sqrt(2.0), double(d)) / L.determinant();
  double s = 0;
  std::vector<int> it(std::size_t(d), 0);
  const std::size_t cells = d == 1 ? std::size_t(nodes) : std::size_t(nodes) * std::size_t(nodes);
  for (std::size_t c = 0; c < cells; ++c) {
    Eigen::VectorXd y(d);
    double w = 1;
    std::size_t rest = c;
    for (Eigen::Index k = 0; k < d; ++k) {
      auto q = rest % std::size_t(nodes);
      rest /= std::size_t(nodes);
      y(k) = g.nodes[q];
      w *= g.weights[q];
    }
    Eigen::VectorXd x = std::sqrt(2.0) * LTinv * y;
    double h = evaluate(Bc, n, x.cast<cplx>()).real();
    s += w * h * h;
  }
  return jac * s;
}

struct Reduction {
  Eigen::MatrixXd O;  // rows are eigenvectors: B = O^T diag(scales) O
  Eigen::VectorXd scales;
  int zero_modes = 0;
};

inline Reduction reduce(const Eigen::MatrixXd& B, double tol = 1e-10) {
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > kUnitaryTol)
    throw std::invalid_argument("defining matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  Reduction r{es.eigenvectors().transpose(), es.eigenvalues(), 0};
  double scale = std::max(1.0, r.scales.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < r.scales.size(); ++k)
    if (std::abs(r.scales(k)) <= tol * scale) ++r.zero_modes;
  // Diagonal input keeps its own axes.
  if ((B - Eigen::MatrixXd(B.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0) {
    r.O = Eigen::MatrixXd::Identity(B.rows(), B.cols());
    r.scales = B.diagonal();
  }
  return r;
}

}  // namespace qoptics::mdhp

#endif  // QOPTICS_MDHP_HPP
