// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Straightforward reference evaluations used as test oracles. Everything here
// works on plain nested loops over dense data, independent of the library's
// cached sums and incremental updates.

#ifndef S3VM_TESTS_ORACLES_HPP_
#define S3VM_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "s3vm/dataset.hpp"
#include "s3vm/kernels.hpp"
#include "s3vm/qp_relax.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

struct Problem {
  Matrix Kll, Kuu, Klu;  // Klu[i][j], i in L, j in U
  std::vector<double> y;
  double d = 1.0;
  double C = 1.0;
  double Cs = 1.0;

  s3vm::KernelBlocks blocks() const {
    const auto nl = static_cast<Eigen::Index>(Kll.size());
    const auto nu = static_cast<Eigen::Index>(Kuu.size());
    Eigen::MatrixXd ll(nl, nl), uu(nu, nu), lu(nl, nu);
    Eigen::VectorXd yy(nl);
    for (Eigen::Index i = 0; i < nl; ++i) {
      yy[i] = y[i];
      for (Eigen::Index k = 0; k < nl; ++k) ll(i, k) = Kll[i][k];
      for (Eigen::Index j = 0; j < nu; ++j) lu(i, j) = Klu[i][j];
    }
    for (Eigen::Index j = 0; j < nu; ++j) {
      for (Eigen::Index k = 0; k < nu; ++k) uu(j, k) = Kuu[j][k];
    }
    return s3vm::make_blocks(ll, uu, lu, yy, d);
  }

  s3vm::S3vmConfig config(double r = 0.5) const {
    s3vm::S3vmConfig cfg;
    cfg.C = C;
    cfg.C_star = Cs;
    cfg.r = r;
    return cfg;
  }
};

// Gram blocks of random points in [0,1]^dim. Linear kernels use d = dim.
inline Problem random_problem(std::size_t nl, std::size_t nu, std::size_t dim, bool rbf, std::uint64_t seed,
                              double gamma = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> pts(nl + nu, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& v : p) v = unit(rng);
  }
  auto k = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      s += rbf ? (pts[a][f] - pts[b][f]) * (pts[a][f] - pts[b][f]) : pts[a][f] * pts[b][f];
    }
    return rbf ? std::exp(-gamma * s) : s;
  };
  Problem pr;
  pr.d = rbf ? 1.0 : static_cast<double>(dim);
  pr.C = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  pr.Cs = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  pr.Kll.assign(nl, std::vector<double>(nl));
  pr.Kuu.assign(nu, std::vector<double>(nu));
  pr.Klu.assign(nl, std::vector<double>(nu));
  for (std::size_t i = 0; i < nl; ++i) {
    pr.y.push_back(i % 2 == 0 ? 1.0 : -1.0);
    for (std::size_t q = 0; q < nl; ++q) pr.Kll[i][q] = k(i, q);
    for (std::size_t j = 0; j < nu; ++j) pr.Klu[i][j] = k(i, nl + j);
  }
  for (std::size_t j = 0; j < nu; ++j) {
    for (std::size_t q = 0; q < nu; ++q) pr.Kuu[j][q] = k(nl + j, nl + q);
  }
  return pr;
}

// (1/2) C*^2 sum_{j,j'} (1 - p_j) K[j,j'] p_j' + C C* sum_{i,j} y_i K_lu[i,j] (1 - p_j)
inline double qp(const Problem& pr, const std::vector<double>& p) {
  double a = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t q = 0; q < p.size(); ++q) a += (1.0 - p[j]) * pr.Kuu[j][q] * p[q];
  }
  double b = 0.0;
  for (std::size_t i = 0; i < pr.y.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) b += pr.y[i] * pr.Klu[i][j] * (1.0 - p[j]);
  }
  return 0.5 * pr.Cs * pr.Cs * a + pr.C * pr.Cs * b;
}

// S(A) with every sum written out, including the delta in the Q5 double sum.
inline double s(const Problem& pr, const std::vector<bool>& in_a) {
  const std::size_t nu = pr.Kuu.size();
  const std::size_t nl = pr.y.size();
  const double cs2 = pr.Cs * pr.Cs;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t5 = 0.0;
  for (std::size_t j = 0; j < nu; ++j) {
    if (!in_a[j]) continue;
    for (std::size_t q = 0; q < nu; ++q) t1 += pr.Kuu[j][q];
    for (std::size_t i = 0; i < nl; ++i) t2 += pr.y[i] * pr.Klu[i][j];
    for (std::size_t q = 0; q < nu; ++q) {
      if (!in_a[q]) continue;
      t3 += pr.Kuu[j][q];
      const double delta = j == q ? 1.0 : 0.0;
      t5 += delta * (1.5 * cs2 * static_cast<double>(nu) + pr.C * pr.Cs * static_cast<double>(nl)) - 0.5 * cs2;
    }
  }
  return -0.5 * cs2 * t1 + pr.C * pr.Cs * t2 + 0.5 * cs2 * t3 + pr.d * t5;
}

inline std::vector<bool> members(std::uint32_t mask, std::size_t n) {
  std::vector<bool> in(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = (mask >> j & 1U) != 0;
  return in;
}

struct Best {
  std::uint32_t mask = 0;
  double value = -std::numeric_limits<double>::infinity();
};

inline Best max_s_of_size(const Problem& pr, std::size_t k) {
  const std::size_t n = pr.Kuu.size();
  Best best;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    const double v = s(pr, members(mask, n));
    if (v > best.value) best = {mask, v};
  }
  return best;
}

inline Best min_qp_of_size(const Problem& pr, std::size_t k) {
  const std::size_t n = pr.Kuu.size();
  Best best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = (mask >> j & 1U) ? 1.0 : 0.0;
    const double v = qp(pr, p);
    if (v < best.value) best = {mask, v};
  }
  return best;
}

// Dual objective written as scalar sums.
inline double dual(const Problem& pr, const std::vector<double>& alpha, const std::vector<double>& beta,
                   const std::vector<double>& gamma) {
  const std::size_t nl = alpha.size();
  const std::size_t nu = beta.size();
  double v = 0.0;
  for (double a : alpha) v += a;
  for (std::size_t j = 0; j < nu; ++j) v += gamma[j] + beta[j];
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t q = 0; q < nl; ++q) v -= 0.5 * alpha[i] * pr.y[i] * pr.Kll[i][q] * alpha[q] * pr.y[q];
  }
  for (std::size_t j = 0; j < nu; ++j) {
    for (std::size_t q = 0; q < nu; ++q) v -= 0.5 * (gamma[j] - beta[j]) * pr.Kuu[j][q] * (gamma[q] - beta[q]);
  }
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = 0; j < nu; ++j) v -= alpha[i] * pr.y[i] * pr.Klu[i][j] * (gamma[j] - beta[j]);
  }
  return v;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle

#endif  // S3VM_TESTS_ORACLES_HPP_
