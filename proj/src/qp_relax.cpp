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

#include "s3vm/qp_relax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "s3vm/error.hpp"
#include "s3vm/parallel.hpp"

namespace s3vm {
namespace {

void check_soft_labels(const SoftLabels& P, const KernelBlocks& K) {
  if (static_cast<std::size_t>(P.p.size()) != K.n_unlabeled()) {
    throw DimensionMismatch("soft labels have " + std::to_string(P.p.size()) + " entries, |U| is " +
                            std::to_string(K.n_unlabeled()));
  }
}

// Same expression as qp_objective without the size check; the solver calls it
// in its inner loop.
double objective_unchecked(const Eigen::VectorXd& p, const KernelBlocks& K, const S3vmConfig& cfg) {
  const Eigen::VectorXd one_minus = Eigen::VectorXd::Ones(p.size()) - p;
  const double cs = cfg.C_star;
  return 0.5 * cs * cs * one_minus.dot(K.K_uu * p) + cfg.C * cs * K.ylabelsum_lu.dot(one_minus);
}

Eigen::VectorXd gradient(const Eigen::VectorXd& p, const KernelBlocks& K, const S3vmConfig& cfg) {
  const double cs = cfg.C_star;
  return 0.5 * cs * cs * (K.rowsum_uu - 2.0 * (K.K_uu * p)) - cfg.C * cs * K.ylabelsum_lu;
}

struct RestartResult {
  Eigen::VectorXd p;
  double start = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
};

RestartResult descend(const KernelBlocks& K, const S3vmConfig& cfg, double total, std::size_t restart) {
  const Eigen::Index n = static_cast<Eigen::Index>(K.n_unlabeled());
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(restart)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = unit(rng);

  RestartResult res;
  res.p = project_capped_simplex(v, total);
  res.start = objective_unchecked(res.p, K, cfg);
  double f = res.start;

  const double curvature = cfg.C_star * cfg.C_star * K.K_uu.cwiseAbs().rowwise().sum().maxCoeff();
  const double step0 = curvature > 0.0 ? 1.0 / curvature : 1.0;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    ++res.iterations;
    const Eigen::VectorXd g = gradient(res.p, K, cfg);
    double step = step0;
    bool moved = false;
    Eigen::VectorXd next;
    double f_next = f;
    for (int halvings = 0; halvings < 40; ++halvings, step *= 0.5) {
      next = project_capped_simplex(res.p - step * g, total);
      f_next = objective_unchecked(next, K, cfg);
      if (f_next < f) {
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const double change = (next - res.p).cwiseAbs().maxCoeff();
    const double decrease = f - f_next;
    res.p = std::move(next);
    f = f_next;
    if (change < cfg.tol || decrease <= cfg.tol * (1.0 + std::abs(f))) break;
  }
  res.objective = f;
  return res;
}

}  // namespace

std::size_t positive_count(double r, std::size_t n_unlabeled) {
  return static_cast<std::size_t>(std::floor(r * static_cast<double>(n_unlabeled) + 0.5));
}

double qp_objective(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg) {
  check_soft_labels(P, K);
  return objective_unchecked(P.p, K, cfg);
}

double qp_objective_standard(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg) {
  check_soft_labels(P, K);
  const double cs = cfg.C_star;
  const Eigen::VectorXd linear = 0.5 * cs * cs * K.rowsum_uu - cfg.C * cs * K.ylabelsum_lu;
  return -0.5 * cs * cs * P.p.dot(K.K_uu * P.p) + linear.dot(P.p);
}

QDecomposition decompose_q(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg) {
  check_soft_labels(P, K);
  const double half_cs2 = 0.5 * cfg.C_star * cfg.C_star;
  const double ccs = cfg.C * cfg.C_star;
  const Eigen::Index nu = P.p.size();
  QDecomposition q;
  for (Eigen::Index j = 0; j < nu; ++j) {
    const double pj = P.p[j];
    q.q1 += K.K_uu(j, j) * pj * (1.0 - pj);
    for (Eigen::Index jj = j + 1; jj < nu; ++jj) {
      const double pjj = P.p[jj];
      q.q2 += K.K_uu(j, jj) * (pj + pjj - 2.0 * pj * pjj);
    }
  }
  q.q1 *= half_cs2;
  q.q2 *= half_cs2;
  for (Eigen::Index i = 0; i < K.y.size(); ++i) {
    for (Eigen::Index j = 0; j < nu; ++j) {
      if (K.y[i] > 0.0) {
        q.q3 += K.K_lu(i, j) * (1.0 - P.p[j]);
      } else {
        q.q4 += K.K_lu(i, j) * (P.p[j] - 1.0);
      }
    }
  }
  q.q3 *= ccs;
  q.q4 *= ccs;
  return q;
}

bool is_feasible(const DualPoint& dp, const SoftLabels& P, const S3vmConfig& cfg) {
  const double tol = 1e-12 * std::max({1.0, cfg.C, cfg.C_star});
  if (dp.beta.size() != P.p.size() || dp.gamma.size() != P.p.size()) return false;
  for (Eigen::Index i = 0; i < dp.alpha.size(); ++i) {
    if (dp.alpha[i] < -tol || dp.alpha[i] > cfg.C + tol) return false;
  }
  for (Eigen::Index j = 0; j < P.p.size(); ++j) {
    if (dp.gamma[j] < -tol || dp.gamma[j] > cfg.C_star * P.p[j] + tol) return false;
    if (dp.beta[j] < -tol || dp.beta[j] > cfg.C_star * (1.0 - P.p[j]) + tol) return false;
  }
  return true;
}

double dual_objective(const DualPoint& dp, const SoftLabels& P, const KernelBlocks& K,
                      const S3vmConfig& cfg) {
  check_soft_labels(P, K);
  if (static_cast<std::size_t>(dp.alpha.size()) != K.n_labeled()) {
    throw DimensionMismatch("alpha must have |L| entries");
  }
  if (dp.beta.size() != P.p.size() || dp.gamma.size() != P.p.size()) {
    throw DimensionMismatch("beta and gamma must have |U| entries");
  }
  if (!is_feasible(dp, P, cfg)) throw InvalidArgument("dual point violates its box constraints");
  const Eigen::VectorXd ay = dp.alpha.cwiseProduct(K.y);
  const Eigen::VectorXd gb = dp.gamma - dp.beta;
  return dp.alpha.sum() + (dp.gamma + dp.beta).sum() - 0.5 * ay.dot(K.K_ll * ay) -
         0.5 * gb.dot(K.K_uu * gb) - ay.dot(K.K_lu * gb);
}

double upper_bound(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg, double i_wstar) {
  return i_wstar + cfg.C_star * static_cast<double>(K.n_unlabeled()) + qp_objective(P, K, cfg);
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double total) {
  const Eigen::Index n = v.size();
  if (total < 0.0 || total > static_cast<double>(n)) {
    throw InvalidArgument("project_capped_simplex: target sum outside [0, n]");
  }
  auto clipped_sum = [&](double tau) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += std::clamp(v[j] - tau, 0.0, 1.0);
    return s;
  };
  // clipped_sum is non-increasing in tau: n at lo, 0 at hi.
  double lo = v.minCoeff() - 1.0;
  double hi = v.maxCoeff();
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (clipped_sum(mid) > total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double tau = 0.5 * (lo + hi);

  // Solve exactly for tau on the active set found by bisection.
  double free_sum = 0.0;
  std::size_t n_free = 0;
  std::size_t n_upper = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = v[j] - tau;
    if (x >= 1.0) {
      ++n_upper;
    } else if (x > 0.0) {
      free_sum += v[j];
      ++n_free;
    }
  }
  if (n_free > 0) {
    const double exact = (free_sum + static_cast<double>(n_upper) - total) / static_cast<double>(n_free);
    if (std::abs(exact - tau) <= 1e-9) tau = exact;
  }
  Eigen::VectorXd p(n);
  for (Eigen::Index j = 0; j < n; ++j) p[j] = std::clamp(v[j] - tau, 0.0, 1.0);
  return p;
}

QpSolution solve_qp(const KernelBlocks& K, const S3vmConfig& cfg) {
  const std::size_t nu = K.n_unlabeled();
  const std::size_t k = positive_count(cfg.r, nu);
  if (k < 1 || k > nu) {
    throw InvalidArgument("solve_qp: round(r|U|) = " + std::to_string(k) + " is outside [1, " +
                          std::to_string(nu) + "]");
  }
  if (cfg.restarts == 0) throw InvalidArgument("solve_qp: restarts must be positive");

  QpSolution sol;
  if (k == nu) {
    sol.labels.p = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(nu));
    sol.objective = objective_unchecked(sol.labels.p, K, cfg);
    sol.start_objectives.assign(cfg.restarts, sol.objective);
    sol.final_objectives.assign(cfg.restarts, sol.objective);
    return sol;
  }

  std::vector<RestartResult> results(cfg.restarts);
  parallel_chunks(cfg.restarts, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) results[r] = descend(K, cfg, static_cast<double>(k), r);
  });

  for (std::size_t r = 0; r < results.size(); ++r) {
    sol.start_objectives.push_back(results[r].start);
    sol.final_objectives.push_back(results[r].objective);
    sol.iterations += results[r].iterations;
    if (r == 0 || results[r].objective < results[sol.best_restart].objective) sol.best_restart = r;
  }
  sol.labels.p = std::move(results[sol.best_restart].p);
  sol.objective = results[sol.best_restart].objective;
  return sol;
}

std::vector<Label> round_to_labels(const SoftLabels& P, std::size_t k) {
  const std::size_t n = static_cast<std::size_t>(P.p.size());
  if (k > n) throw InvalidArgument("round_to_labels: k exceeds |U|");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return P.p[static_cast<Eigen::Index>(a)] > P.p[static_cast<Eigen::Index>(b)];
  });
  std::vector<Label> labels(n, Label::negative);
  for (std::size_t t = 0; t < k; ++t) labels[order[t]] = Label::positive;
  return labels;
}

std::vector<Label> round_to_labels(const SoftLabels& P, double r) {
  return round_to_labels(P, positive_count(r, static_cast<std::size_t>(P.p.size())));
}

VertexMinimum vertex_minimum(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k) {
  const std::size_t n = K.n_unlabeled();
  if (n > 20) throw InvalidArgument("vertex_minimum: |U| > 20 is too large to enumerate");
  if (k > n) throw InvalidArgument("vertex_minimum: k exceeds |U|");
  VertexMinimum best;
  best.objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  auto visit = [&](std::uint32_t mask) {
    for (std::size_t j = 0; j < n; ++j) p[static_cast<Eigen::Index>(j)] = (mask >> j) & 1U ? 1.0 : 0.0;
    const double f = objective_unchecked(p, K, cfg);
    if (f < best.objective) {
      best.objective = f;
      best.labels.p = p;
    }
  };
  if (k == 0) {
    visit(0);
    return best;
  }
  // Gosper's hack: all n-bit masks with k bits set, in increasing order.
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = (std::uint32_t{1} << k) - 1; mask < limit;) {
    visit(mask);
    const std::uint32_t c = mask & (~mask + 1);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return best;
}

}  // namespace s3vm
