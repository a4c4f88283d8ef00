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

// Set-function form of the quadratic relaxation. For A a subset of U (the
// samples labeled +1):
//
//   S(A) = -(1/2) C*^2 sum_{j in A, j' in U} K_uu[j,j']
//          + C C* sum_{j in A, i in L} y_i K_lu[i,j]
//          + (1/2) C*^2 sum_{j,j' in A} K_uu[j,j']
//          + d sum_{j,j' in A} [delta_jj' ((3/2) C*^2 |U| + C C* |L|) - (1/2) C*^2]
//
// The last term depends on |A| only. With 0 <= K <= d, S is monotone and
// submodular with S(empty) = 0, so the greedy algorithm is within (1 - 1/e)
// of the best size-k set. Adding m to A changes S by
//
//   -(1/2) C*^2 rowsum_uu[m] + C C* ylabelsum_lu[m] + C*^2 sum_{j in A} K_uu[m,j]
//   - d C*^2 |A| + (1/2) C*^2 (K_uu[m,m] - d) + d ((3/2) C*^2 |U| + C C* |L|)

#ifndef S3VM_SUBMODULAR_HPP_
#define S3VM_SUBMODULAR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "s3vm/dataset.hpp"
#include "s3vm/kernels.hpp"
#include "s3vm/qp_relax.hpp"

namespace s3vm {

// Direct evaluation of S(A); A holds positions in U. Throws InvalidArgument
// for out-of-range or repeated positions.
double s_value(std::span<const std::size_t> A, const KernelBlocks& K, const S3vmConfig& cfg);

// Greedy state: the selected set plus per-candidate running sums that make a
// marginal gain O(1).
class SelectionState {
 public:
  SelectionState(const UnlabeledKernel& kernel, const S3vmConfig& cfg);

  // S(A + m) - S(A). Throws InvalidArgument if m is already selected.
  double gain(std::size_t m) const;
  // Adds m and updates sum_a for every candidate from one K_uu row.
  void insert(std::size_t m);

  bool contains(std::size_t m) const { return in_set_[m]; }
  const std::vector<std::size_t>& selected() const { return selected_; }
  double value() const { return value_; }
  double sum_a(std::size_t m) const { return sum_a_[m]; }
  std::size_t n_unlabeled() const { return base_.size(); }

 private:
  double unchecked_gain(std::size_t m) const;

  const UnlabeledKernel* kernel_;
  double cs2_;
  double d_;
  std::vector<double> base_;   // every term of the gain that does not depend on A
  std::vector<double> sum_a_;  // sum_{j in A} K_uu[m, j]
  std::vector<double> row_;
  std::vector<bool> in_set_;
  std::vector<std::size_t> selected_;
  double value_ = 0.0;
};

inline double marginal_gain(const SelectionState& state, std::size_t m) { return state.gain(m); }

struct GreedyResult {
  std::vector<std::size_t> selected;  // positions in U, in selection order
  std::vector<double> gains;          // gain of each round
  std::vector<double> values;         // S after each round
  double value = 0.0;
  std::vector<Label> labels;          // selected -> +1, rest of U -> -1
  std::size_t evaluations = 0;        // marginal gains computed
};

// Called with the state before each insertion (round is 0-based).
using RoundObserver = std::function<void(const SelectionState& state, std::size_t round, std::size_t chosen)>;

// k rounds of argmax marginal gain, ties to the lowest index. Throws
// InvalidArgument unless 1 <= k <= |U|.
GreedyResult greedy_maximize(const UnlabeledKernel& kernel, const S3vmConfig& cfg, std::size_t k,
                             const RoundObserver& observer = {});
GreedyResult greedy_maximize(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k,
                             const RoundObserver& observer = {});

// Same selections as greedy_maximize, re-evaluating only candidates whose
// stale gain could still win.
GreedyResult lazy_greedy_maximize(const UnlabeledKernel& kernel, const S3vmConfig& cfg, std::size_t k,
                                  const RoundObserver& observer = {});
GreedyResult lazy_greedy_maximize(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k,
                                  const RoundObserver& observer = {});

struct BruteForceResult {
  std::vector<std::size_t> selected;  // ascending positions in U
  double value = 0.0;
};

// Exact maximizer of S over all subsets of size <= k (|U| <= 20).
BruteForceResult brute_force_max(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k);

struct SubmodularityReport {
  std::size_t trials = 0;
  double max_monotonicity_violation = 0.0;
  double max_submodularity_violation = 0.0;
  double tolerance = 1e-9;

  bool passed() const {
    return max_monotonicity_violation <= tolerance && max_submodularity_violation <= tolerance;
  }
};

// Samples chains A <= B < U with m outside B from random permutations and
// measures violations of S(A) <= S(B), S(A+m) >= S(A) and
// S(A+m) - S(A) >= S(B+m) - S(B) using direct evaluations of S.
SubmodularityReport check_submodularity(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t trials,
                                        std::uint64_t seed);

// CSV with header `index,label,round`: sample index (in the source data),
// assigned label and selection round (-1 when not selected), one row per
// unlabeled sample in U order.
std::string solution_csv(const GreedyResult& result, std::span<const std::size_t> unlabeled_idx);

// JSON array of {"round", "index", "gain", "value"} per round, index being
// the sample index in the source data.
std::string trace_json(const GreedyResult& result, std::span<const std::size_t> unlabeled_idx);

}  // namespace s3vm

#endif  // S3VM_SUBMODULAR_HPP_
