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

#include "s3vm/submodular.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <sstream>

#include <json.hpp>

#include "s3vm/error.hpp"
#include "s3vm/parallel.hpp"

namespace s3vm {
namespace {

double q5_constant(double C, double cs, std::size_t n_labeled, std::size_t n_unlabeled) {
  return 1.5 * cs * cs * static_cast<double>(n_unlabeled) + C * cs * static_cast<double>(n_labeled);
}

void check_k(std::size_t k, std::size_t n, const char* who) {
  if (k < 1 || k > n) {
    throw InvalidArgument(std::string(who) + ": k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
}

GreedyResult finish(const SelectionState& state, GreedyResult result) {
  result.selected = state.selected();
  result.value = state.value();
  result.labels.assign(state.n_unlabeled(), Label::negative);
  for (std::size_t m : result.selected) result.labels[m] = Label::positive;
  return result;
}

struct Best {
  double gain = -std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  bool beats(const Best& other) const {
    return gain > other.gain || (gain == other.gain && index < other.index);
  }
};

}  // namespace

double s_value(std::span<const std::size_t> A, const KernelBlocks& K, const S3vmConfig& cfg) {
  const std::size_t nu = K.n_unlabeled();
  const std::size_t nl = K.n_labeled();
  std::vector<bool> seen(nu, false);
  for (std::size_t j : A) {
    if (j >= nu) throw InvalidArgument("s_value: position " + std::to_string(j) + " outside U");
    if (seen[j]) throw InvalidArgument("s_value: position " + std::to_string(j) + " repeated");
    seen[j] = true;
  }
  const double cs = cfg.C_star;
  const double cs2 = cs * cs;

  double cross_u = 0.0;
  double cross_l = 0.0;
  double inner = 0.0;
  for (std::size_t j : A) {
    for (std::size_t jp = 0; jp < nu; ++jp) cross_u += K.K_uu(jp, j);
    for (std::size_t i = 0; i < nl; ++i) cross_l += K.y[i] * K.K_lu(i, j);
    for (std::size_t jp : A) inner += K.K_uu(jp, j);
  }
  const double c1 = q5_constant(cfg.C, cs, nl, nu);
  double q5 = 0.0;
  for (std::size_t j : A) {
    for (std::size_t jp : A) q5 += (j == jp ? c1 : 0.0) - 0.5 * cs2;
  }
  return -0.5 * cs2 * cross_u + cfg.C * cs * cross_l + 0.5 * cs2 * inner + K.d * q5;
}

SelectionState::SelectionState(const UnlabeledKernel& kernel, const S3vmConfig& cfg)
    : kernel_(&kernel), cs2_(cfg.C_star * cfg.C_star), d_(kernel.bound()) {
  const std::size_t nu = kernel.n_unlabeled();
  const double c1 = q5_constant(cfg.C, cfg.C_star, kernel.n_labeled(), nu);
  base_.resize(nu);
  for (std::size_t m = 0; m < nu; ++m) {
    base_[m] = -0.5 * cs2_ * kernel.row_sum(m) + cfg.C * cfg.C_star * kernel.label_sum(m) +
               0.5 * cs2_ * (kernel.diagonal(m) - d_) + d_ * c1;
  }
  sum_a_.assign(nu, 0.0);
  row_.resize(nu);
  in_set_.assign(nu, false);
}

double SelectionState::unchecked_gain(std::size_t m) const {
  return base_[m] + cs2_ * sum_a_[m] - d_ * cs2_ * static_cast<double>(selected_.size());
}

double SelectionState::gain(std::size_t m) const {
  if (m >= base_.size()) throw InvalidArgument("gain: position " + std::to_string(m) + " outside U");
  if (in_set_[m]) throw InvalidArgument("gain: position " + std::to_string(m) + " already selected");
  return unchecked_gain(m);
}

void SelectionState::insert(std::size_t m) {
  const double g = gain(m);
  kernel_->row(m, row_);
  for (std::size_t j = 0; j < sum_a_.size(); ++j) sum_a_[j] += row_[j];
  in_set_[m] = true;
  selected_.push_back(m);
  value_ += g;
}

GreedyResult greedy_maximize(const UnlabeledKernel& kernel, const S3vmConfig& cfg, std::size_t k,
                             const RoundObserver& observer) {
  const std::size_t nu = kernel.n_unlabeled();
  check_k(k, nu, "greedy_maximize");
  SelectionState state(kernel, cfg);
  GreedyResult result;
  result.gains.reserve(k);
  result.values.reserve(k);
  for (std::size_t round = 0; round < k; ++round) {
    Best best;
    std::mutex best_mutex;
    parallel_chunks(nu, 4096, [&](std::size_t begin, std::size_t end) {
      Best local;
      for (std::size_t m = begin; m < end; ++m) {
        if (state.contains(m)) continue;
        const Best cand{state.gain(m), m};
        if (cand.beats(local)) local = cand;
      }
      std::lock_guard lock(best_mutex);
      if (local.beats(best)) best = local;
    });
    result.evaluations += nu - round;
    if (observer) observer(state, round, best.index);
    state.insert(best.index);
    result.gains.push_back(best.gain);
    result.values.push_back(state.value());
  }
  return finish(state, std::move(result));
}

GreedyResult greedy_maximize(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k,
                             const RoundObserver& observer) {
  const DenseUnlabeledKernel kernel(K);
  return greedy_maximize(kernel, cfg, k, observer);
}

GreedyResult lazy_greedy_maximize(const UnlabeledKernel& kernel, const S3vmConfig& cfg, std::size_t k,
                                  const RoundObserver& observer) {
  const std::size_t nu = kernel.n_unlabeled();
  check_k(k, nu, "lazy_greedy_maximize");

  // A stored priority is the gain from an earlier round plus a small slack,
  // so it stays an upper bound on the current gain under rounding.
  struct Entry {
    double priority;
    double gain;
    std::size_t index;
    std::size_t round;
  };
  const auto lower = [](const Entry& a, const Entry& b) {
    return a.priority < b.priority || (a.priority == b.priority && a.index > b.index);
  };
  const auto inflate = [](double g) { return g + 1e-9 * (1.0 + std::abs(g)); };

  SelectionState state(kernel, cfg);
  GreedyResult result;
  std::vector<Entry> storage;
  storage.reserve(nu);
  for (std::size_t m = 0; m < nu; ++m) {
    const double g = state.gain(m);
    storage.push_back({inflate(g), g, m, 0});
  }
  result.evaluations = nu;
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower, std::move(storage));

  std::vector<Entry> set_aside;
  for (std::size_t round = 0; round < k; ++round) {
    std::optional<Entry> best;
    set_aside.clear();
    while (!heap.empty()) {
      const Entry top = heap.top();
      if (best && top.priority < best->gain) break;
      heap.pop();
      if (top.round != round) {
        const double g = state.gain(top.index);
        ++result.evaluations;
        heap.push({inflate(g), g, top.index, round});
        continue;
      }
      if (!best) {
        best = top;
      } else if (top.gain > best->gain || (top.gain == best->gain && top.index < best->index)) {
        set_aside.push_back(*best);
        best = top;
      } else {
        set_aside.push_back(top);
      }
    }
    for (const Entry& e : set_aside) heap.push(e);
    if (observer) observer(state, round, best->index);
    state.insert(best->index);
    result.gains.push_back(best->gain);
    result.values.push_back(state.value());
  }
  return finish(state, std::move(result));
}

GreedyResult lazy_greedy_maximize(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k,
                                  const RoundObserver& observer) {
  const DenseUnlabeledKernel kernel(K);
  return lazy_greedy_maximize(kernel, cfg, k, observer);
}

BruteForceResult brute_force_max(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t k) {
  const std::size_t nu = K.n_unlabeled();
  if (nu > 20) throw InvalidArgument("brute_force_max: |U| = " + std::to_string(nu) + " exceeds 20");
  check_k(k, nu, "brute_force_max");
  const double cs2 = cfg.C_star * cfg.C_star;
  const double c1 = q5_constant(cfg.C, cfg.C_star, K.n_labeled(), nu);

  // S over masks in increasing order: S(mask) = S(mask - top bit) + gain.
  const std::size_t n_masks = std::size_t{1} << nu;
  std::vector<double> value(n_masks, 0.0);
  BruteForceResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  for (std::size_t mask = 1; mask < n_masks; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size > k) continue;
    const std::size_t m = std::bit_width(mask) - 1;
    const std::size_t rest = mask & ~(std::size_t{1} << m);
    double sum_a = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (rest >> j & 1U) sum_a += K.K_uu(m, j);
    }
    const double a = static_cast<double>(size - 1);
    value[mask] = value[rest] - 0.5 * cs2 * K.rowsum_uu[m] + cfg.C * cfg.C_star * K.ylabelsum_lu[m] +
                  cs2 * sum_a - K.d * cs2 * a + 0.5 * cs2 * (K.K_uu(m, m) - K.d) + K.d * c1;
    if (value[mask] > best.value) {
      best.value = value[mask];
      best_mask = static_cast<std::uint32_t>(mask);
    }
  }
  for (std::size_t j = 0; j < nu; ++j) {
    if (best_mask >> j & 1U) best.selected.push_back(j);
  }
  return best;
}

SubmodularityReport check_submodularity(const KernelBlocks& K, const S3vmConfig& cfg, std::size_t trials,
                                        std::uint64_t seed) {
  const std::size_t nu = K.n_unlabeled();
  SubmodularityReport report;
  if (nu == 0) return report;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> perm(nu);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t t = 0; t < trials; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t b = std::uniform_int_distribution<std::size_t>(0, nu - 1)(rng);
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, b)(rng);
    const std::span<const std::size_t> A(perm.data(), a);
    const std::span<const std::size_t> B(perm.data(), b);
    const std::span<const std::size_t> Bm(perm.data(), b + 1);
    std::vector<std::size_t> Am(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(a));
    Am.push_back(perm[b]);

    const double sa = s_value(A, K, cfg);
    const double sb = s_value(B, K, cfg);
    const double sam = s_value(Am, K, cfg);
    const double sbm = s_value(Bm, K, cfg);
    report.max_monotonicity_violation =
        std::max({report.max_monotonicity_violation, sa - sam, sb - sbm, sa - sb});
    report.max_submodularity_violation = std::max(report.max_submodularity_violation, (sbm - sb) - (sam - sa));
    ++report.trials;
  }
  return report;
}

std::string solution_csv(const GreedyResult& result, std::span<const std::size_t> unlabeled_idx) {
  if (unlabeled_idx.size() != result.labels.size()) {
    throw DimensionMismatch("solution_csv: " + std::to_string(unlabeled_idx.size()) + " indices for " +
                            std::to_string(result.labels.size()) + " labels");
  }
  std::vector<long> round(result.labels.size(), -1);
  for (std::size_t t = 0; t < result.selected.size(); ++t) round[result.selected[t]] = static_cast<long>(t);
  std::ostringstream out;
  out << "index,label,round\n";
  for (std::size_t j = 0; j < unlabeled_idx.size(); ++j) {
    out << unlabeled_idx[j] << ',' << static_cast<int>(result.labels[j]) << ',' << round[j] << '\n';
  }
  return out.str();
}

std::string trace_json(const GreedyResult& result, std::span<const std::size_t> unlabeled_idx) {
  nlohmann::json trace = nlohmann::json::array();
  for (std::size_t t = 0; t < result.selected.size(); ++t) {
    const std::size_t m = result.selected[t];
    if (m >= unlabeled_idx.size()) throw DimensionMismatch("trace_json: selection outside unlabeled_idx");
    trace.push_back({{"round", t}, {"index", unlabeled_idx[m]}, {"gain", result.gains[t]}, {"value", result.values[t]}});
  }
  return trace.dump(2) + "\n";
}

}  // namespace s3vm
