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

// Quadratic relaxation of the semi-supervised SVM over soft labels
// P in [0,1]^|U| with sum(P) = k:
//
//   minimize  (1/2) C*^2 (1-P)' K_uu P + C C* Y' K_lu (1-P)
//
// The Hessian is -C*^2 K_uu, so the objective is concave and its minimum over
// the polytope sits at a binary vertex. solve_qp() is a local method;
// vertex_minimum() enumerates vertices for small |U|.

#ifndef S3VM_QP_RELAX_HPP_
#define S3VM_QP_RELAX_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "s3vm/dataset.hpp"
#include "s3vm/kernels.hpp"

namespace s3vm {

struct S3vmConfig {
  double C = 1.0;
  double C_star = 1.0;
  double r = 0.5;  // fraction of U assigned +1, 0 < r < 1
  double tol = 1e-9;
  std::size_t max_iters = 1000;
  std::size_t restarts = 20;
  std::uint64_t seed = 0;
};

// k = round(r |U|), halves rounded up. Shared by the QP and greedy paths.
std::size_t positive_count(double r, std::size_t n_unlabeled);

struct SoftLabels {
  Eigen::VectorXd p;
};

// Lagrange multipliers of the labeled hinge (alpha), the -1 side (beta) and
// the +1 side (gamma) of each unlabeled sample. Feasible for P when
// 0 <= alpha <= C, 0 <= gamma <= C* P and 0 <= beta <= C* (1 - P).
struct DualPoint {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
};

double qp_objective(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg);

// -(1/2) C*^2 P'K_uu P + ((1/2) C*^2 1'K_uu - C C* Y'K_lu) P. Equals
// qp_objective(P) - qp_objective(0).
double qp_objective_standard(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg);

// Split of qp_objective into the diagonal (q1) and pairwise (q2) parts of the
// first term and the y=+1 (q3) and y=-1 (q4) parts of the second.
struct QDecomposition {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;

  double total() const { return q1 + q2 + q3 + q4; }
};

QDecomposition decompose_q(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg);

bool is_feasible(const DualPoint& dp, const SoftLabels& P, const S3vmConfig& cfg);

// A'1 + (G+B)'1 - (1/2)(A.Y)'K_ll(A.Y) - (1/2)(G-B)'K_uu(G-B) - (A.Y)'K_lu(G-B).
// Throws InvalidArgument if dp is outside its box for P.
double dual_objective(const DualPoint& dp, const SoftLabels& P, const KernelBlocks& K,
                      const S3vmConfig& cfg);

// i_wstar + C* |U| + qp_objective(P).
double upper_bound(const SoftLabels& P, const KernelBlocks& K, const S3vmConfig& cfg, double i_wstar);

// Euclidean projection of v onto {0 <= p <= 1, sum p = total}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double total);

struct QpSolution {
  SoftLabels labels;
  double objective = 0.0;
  std::size_t best_restart = 0;
  std::vector<double> start_objectives;  // one per restart
  std::vector<double> final_objectives;  // one per restart
  std::size_t iterations = 0;            // summed over restarts
};

// Multi-start projected gradient descent over {0 <= P <= 1, sum P = k}.
// Step 1/(C*^2 ||K_uu||_inf), halved while the objective fails to decrease.
// Restarts run concurrently; the lowest objective wins, ties to the lowest
// restart index. Throws InvalidArgument unless 1 <= k <= |U|.
QpSolution solve_qp(const KernelBlocks& K, const S3vmConfig& cfg);

// The k largest p_j become +1, the rest -1; ties go to the lower index.
std::vector<Label> round_to_labels(const SoftLabels& P, std::size_t k);
std::vector<Label> round_to_labels(const SoftLabels& P, double r);

struct VertexMinimum {
  SoftLabels labels;
  double objective = 0.0;
};

// Exact minimum of qp_objective over binary P with sum k, by enumeration.
// Limited to |U| <= 20.
VertexMinimum vertex_minimum(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k);

}  // namespace s3vm

#endif  // S3VM_QP_RELAX_HPP_
