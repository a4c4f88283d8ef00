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

// Random fixtures and the property suites run by `s3vm verify` and the
// acceptance test.

#ifndef S3VM_VERIFY_HPP_
#define S3VM_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "s3vm/dataset.hpp"
#include "s3vm/kernels.hpp"
#include "s3vm/qp_relax.hpp"

namespace s3vm {

struct FixtureSpec {
  std::size_t n_labeled = 4;
  std::size_t n_unlabeled = 10;
  std::size_t dim = 3;
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;
  std::size_t clusters = 0;  // 0: uniform points in [0,1]^dim
  std::uint64_t seed = 0;
};

struct Fixture {
  Dataset data;  // split: L labeled, U masked
  std::vector<Label> truth;
  KernelSpec spec;
  KernelBlocks K;
  S3vmConfig cfg;  // C and C* log-uniform in [0.1, 10], r the true ratio of U
  std::size_t k = 0;
};

// Points in [0,1]^dim labeled by a random hyperplane (or by cluster parity),
// with both classes present in L and in U.
Fixture make_fixture(const FixtureSpec& spec);

// Uniform P on {0 <= p <= 1, sum p = k}, projected from a random vector.
SoftLabels random_soft_labels(std::size_t n, std::size_t k, std::mt19937_64& rng);

// Feasible multipliers for P. Each coordinate is uniform in its box, or at
// one end of it with probability 1/2.
DualPoint sample_feasible_dual(const SoftLabels& P, const S3vmConfig& cfg, std::size_t n_labeled,
                               std::mt19937_64& rng);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t samples = 0;
  double max_violation = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
  nlohmann::json to_json() const;
};

// Monotonicity, diminishing returns and S(empty) = 0 on rbf and linear
// fixtures, the closed-form gain difference, and a fixture with d below the
// largest kernel entry that the checker must flag.
VerifyReport verify_theorem3(std::uint64_t seed, std::size_t fixtures = 24, std::size_t trials = 1000);

// Greedy value against the enumerated optimum: ratio >= 1 - 1/e.
VerifyReport verify_greedy(std::uint64_t seed, std::size_t fixtures = 24);

// Dual objective at random feasible points against the upper bound, with
// I(w*) from the supervised solver on L.
VerifyReport verify_theorem1(std::uint64_t seed, std::size_t fixtures = 20, std::size_t samples = 1000);

// Equal-size subset differences of S against the QP objective, and the
// size-k maximizer of S against the size-k minimizer of the QP.
VerifyReport verify_equivalence(std::uint64_t seed, std::size_t fixtures = 20);

// Enumerated vertex minimum against solve_qp with 20 restarts.
VerifyReport verify_vertex(std::uint64_t seed, std::size_t fixtures = 20);

// Closed-form gains against differences of s_value on sampled candidates
// of every greedy round, for |U| up to max_unlabeled.
VerifyReport verify_incremental(std::uint64_t seed, std::size_t max_unlabeled = 2000);

struct NamedSplit {
  std::string name;
  Dataset split;
  KernelSpec kernel;
  S3vmConfig cfg;
};

// Plain and lazy greedy on random and clustered fixtures, an australian-sized
// synthetic set and any extra splits: same selections, evaluation counts.
VerifyReport verify_lazy(std::uint64_t seed, const std::vector<NamedSplit>& extra = {});

// "theorem1", "theorem3", "greedy", "equivalence", "vertex", "incremental",
// "lazy" or "all".
std::vector<VerifyReport> run_verify(std::string_view suite, std::uint64_t seed);

}  // namespace s3vm

#endif  // S3VM_VERIFY_HPP_
