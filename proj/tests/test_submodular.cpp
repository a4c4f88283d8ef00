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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "oracles.hpp"
#include "s3vm/error.hpp"
#include "s3vm/submodular.hpp"

using namespace s3vm;

namespace {

std::vector<std::size_t> positions(const std::vector<bool>& in) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (in[j]) out.push_back(j);
  }
  return out;
}

// Well separated groups of near-identical points under an rbf kernel.
oracle::Problem clustered_problem(std::size_t nu, std::size_t groups, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<double> centers;
  for (std::size_t g = 0; g < groups; ++g) centers.push_back(static_cast<double>(g) / static_cast<double>(groups));
  std::vector<double> xs;
  for (std::size_t j = 0; j < nu + 2; ++j) xs.push_back(centers[j % groups] + noise(rng));
  auto k = [](double a, double b) { return std::exp(-20.0 * (a - b) * (a - b)); };
  oracle::Problem pr;
  pr.C = 1.0;
  pr.Cs = 0.5;
  pr.y = {1.0, -1.0};
  pr.Kll.assign(2, std::vector<double>(2));
  pr.Klu.assign(2, std::vector<double>(nu));
  pr.Kuu.assign(nu, std::vector<double>(nu));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t q = 0; q < 2; ++q) pr.Kll[i][q] = k(xs[i], xs[q]);
    for (std::size_t j = 0; j < nu; ++j) pr.Klu[i][j] = k(xs[i], xs[2 + j]);
  }
  for (std::size_t j = 0; j < nu; ++j) {
    for (std::size_t q = 0; q < nu; ++q) pr.Kuu[j][q] = k(xs[2 + j], xs[2 + q]);
  }
  return pr;
}

}  // namespace

TEST_CASE("s_value examples") {
  const KernelBlocks K = make_blocks(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0),
                                     Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Ones(1), 1.0);
  S3vmConfig cfg;
  cfg.C = cfg.C_star = 1.0;
  const std::vector<std::size_t> none;
  const std::vector<std::size_t> one{0};
  CHECK(s_value(none, K, cfg) == 0.0);
  CHECK(s_value(one, K, cfg) == doctest::Approx(2.5));
  const DenseUnlabeledKernel kernel(K);
  const SelectionState state(kernel, cfg);
  CHECK(state.gain(0) == doctest::Approx(2.5));
  const std::vector<std::size_t> out_of_range{1};
  const std::vector<std::size_t> repeated{0, 0};
  CHECK_THROWS_AS(s_value(out_of_range, K, cfg), InvalidArgument);
  CHECK_THROWS_AS(s_value(repeated, K, cfg), InvalidArgument);
}

TEST_CASE("s_value matches the written-out sums") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const oracle::Problem pr = oracle::random_problem(4, 9, 3, rep % 2 == 0, rng());
    const KernelBlocks K = pr.blocks();
    for (std::uint32_t mask = 0; mask < (1U << 9); mask += 7) {
      const std::vector<bool> in = oracle::members(mask, 9);
      CHECK(oracle::rel_diff(s_value(positions(in), K, pr.config()), oracle::s(pr, in)) <= 1e-12);
    }
  }
}

TEST_CASE("equal-size subsets differ from the QP by the same constant") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const oracle::Problem pr = oracle::random_problem(3, 8, 2, rep % 2 == 1, rng());
    const KernelBlocks K = pr.blocks();
    const S3vmConfig cfg = pr.config();
    std::vector<double> offset(9, std::numeric_limits<double>::quiet_NaN());
    for (std::uint32_t mask = 0; mask < (1U << 8); ++mask) {
      const std::vector<bool> in = oracle::members(mask, 8);
      std::vector<double> p(8);
      for (std::size_t j = 0; j < 8; ++j) p[j] = in[j] ? 1.0 : 0.0;
      const double standard = oracle::qp(pr, p) - oracle::qp(pr, std::vector<double>(8, 0.0));
      const double c = oracle::s(pr, in) + standard;
      const std::size_t size = positions(in).size();
      if (std::isnan(offset[size])) offset[size] = c;
      CHECK(oracle::rel_diff(c, offset[size]) <= 1e-9);
    }
  }
}

TEST_CASE("marginal gains equal differences of S") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const oracle::Problem pr = oracle::random_problem(5, 12, 4, rep % 2 == 0, rng());
    const KernelBlocks K = pr.blocks();
    const S3vmConfig cfg = pr.config();
    const DenseUnlabeledKernel kernel(K);
    SelectionState state(kernel, cfg);
    std::vector<bool> in(12, false);
    std::vector<std::size_t> order(12);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t step = 0; step < 12; ++step) {
      const double s_a = oracle::s(pr, in);
      for (std::size_t m = 0; m < 12; ++m) {
        if (in[m]) {
          CHECK_THROWS_AS(marginal_gain(state, m), InvalidArgument);
          continue;
        }
        std::vector<bool> with = in;
        with[m] = true;
        const double s_am = oracle::s(pr, with);
        CHECK(std::abs(marginal_gain(state, m) - (s_am - s_a)) <= 1e-9 * std::max({1.0, std::abs(s_a), std::abs(s_am)}));
        CHECK(marginal_gain(state, m) >= -1e-9);
        double direct = 0.0;
        for (std::size_t j = 0; j < 12; ++j) direct += in[j] ? pr.Kuu[m][j] : 0.0;
        CHECK(state.sum_a(m) == doctest::Approx(direct).epsilon(1e-12));
      }
      state.insert(order[step]);
      in[order[step]] = true;
      CHECK(oracle::rel_diff(state.value(), oracle::s(pr, in)) <= 1e-9);
    }
  }
}

TEST_CASE("diminishing returns closed form on rbf kernels") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const oracle::Problem pr = oracle::random_problem(3, 8, 2, true, rng());
    std::vector<bool> a = oracle::members(static_cast<std::uint32_t>(rng() % 64), 8);
    const std::size_t q = 6;
    const std::size_t m = 7;
    auto gain = [&](std::vector<bool> base) {
      const double before = oracle::s(pr, base);
      base[m] = true;
      return oracle::s(pr, base) - before;
    };
    std::vector<bool> aq = a;
    aq[q] = true;
    const double diff = gain(a) - gain(aq);
    CHECK(diff == doctest::Approx(pr.Cs * pr.Cs * (1.0 - pr.Kuu[q][m])).epsilon(1e-9));
    CHECK(diff >= 0.0);
  }
}

TEST_CASE("greedy on a modular fixture is exact") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    oracle::Problem pr = oracle::random_problem(3, 10, 2, true, rng());
    for (std::size_t j = 0; j < 10; ++j) {
      for (std::size_t q = 0; q < 10; ++q) {
        if (j != q) pr.Kuu[j][q] = 0.0;
      }
    }
    const KernelBlocks K = pr.blocks();
    for (std::size_t k = 1; k <= 10; ++k) {
      const GreedyResult g = greedy_maximize(K, pr.config(), k);
      const oracle::Best best = oracle::max_s_of_size(pr, k);
      CHECK(oracle::rel_diff(g.value, best.value) <= 1e-12);
    }
  }
}

TEST_CASE("greedy reaches 1 - 1/e of the optimum") {
  std::mt19937_64 rng(6);
  double worst = 1.0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t nu = 4 + rng() % 9;
    const oracle::Problem pr = oracle::random_problem(2 + rng() % 4, nu, 3, rep % 2 == 0, rng());
    const std::size_t k = positive_count(0.5, nu);
    const GreedyResult g = greedy_maximize(pr.blocks(), pr.config(), k);
    const oracle::Best best = oracle::max_s_of_size(pr, k);
    CHECK(g.value <= best.value + 1e-9 * std::abs(best.value));
    worst = std::min(worst, g.value / best.value);
  }
  CHECK(worst >= 1.0 - std::exp(-1.0));
}

TEST_CASE("greedy bookkeeping") {
  const oracle::Problem pr = oracle::random_problem(3, 15, 3, false, 7);
  const KernelBlocks K = pr.blocks();
  const S3vmConfig cfg = pr.config();
  const GreedyResult g = greedy_maximize(K, cfg, 6);
  REQUIRE(g.selected.size() == 6);
  CHECK(g.gains.size() == 6);
  CHECK(g.values.size() == 6);
  CHECK(g.evaluations == 15 + 14 + 13 + 12 + 11 + 10);
  double running = 0.0;
  for (std::size_t t = 0; t < 6; ++t) {
    running += g.gains[t];
    CHECK(g.values[t] == doctest::Approx(running));
    CHECK(g.gains[t] >= -1e-9);
    const std::vector<std::size_t> prefix(g.selected.begin(), g.selected.begin() + static_cast<std::ptrdiff_t>(t + 1));
    CHECK(oracle::rel_diff(g.values[t], s_value(prefix, K, cfg)) <= 1e-9);
  }
  std::size_t positives = 0;
  for (std::size_t j = 0; j < 15; ++j) {
    const bool picked = std::find(g.selected.begin(), g.selected.end(), j) != g.selected.end();
    CHECK(g.labels[j] == (picked ? Label::positive : Label::negative));
    positives += picked ? 1 : 0;
  }
  CHECK(positives == 6);

  const GreedyResult all = greedy_maximize(K, cfg, 15);
  CHECK(std::all_of(all.labels.begin(), all.labels.end(), [](Label l) { return l == Label::positive; }));
  CHECK_THROWS_AS(greedy_maximize(K, cfg, 0), InvalidArgument);
  CHECK_THROWS_AS(greedy_maximize(K, cfg, 16), InvalidArgument);
  CHECK_THROWS_AS(lazy_greedy_maximize(K, cfg, 16), InvalidArgument);
}

TEST_CASE("ties go to the lowest index") {
  const KernelBlocks K = make_blocks(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Constant(4, 4, 1.0),
                                     Eigen::MatrixXd::Constant(2, 4, 0.5), Eigen::Vector2d(1.0, -1.0), 1.0);
  S3vmConfig cfg;
  const GreedyResult plain = greedy_maximize(K, cfg, 3);
  const GreedyResult lazy = lazy_greedy_maximize(K, cfg, 3);
  CHECK(plain.selected == std::vector<std::size_t>{0, 1, 2});
  CHECK(lazy.selected == plain.selected);
}

TEST_CASE("observer sees the state before each insertion") {
  const oracle::Problem pr = oracle::random_problem(3, 10, 3, true, 8);
  std::vector<std::size_t> rounds;
  std::vector<std::size_t> chosen;
  const GreedyResult g = lazy_greedy_maximize(pr.blocks(), pr.config(), 4,
                                              [&](const SelectionState& state, std::size_t round, std::size_t m) {
                                                CHECK(state.selected().size() == round);
                                                CHECK_FALSE(state.contains(m));
                                                rounds.push_back(round);
                                                chosen.push_back(m);
                                              });
  CHECK(rounds == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(chosen == g.selected);
}

TEST_CASE("lazy greedy selects exactly what plain greedy selects") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t nu = 5 + rng() % 60;
    const oracle::Problem pr = oracle::random_problem(2 + rng() % 5, nu, 1 + rng() % 5, rep % 2 == 0, rng());
    const KernelBlocks K = pr.blocks();
    const std::size_t k = 1 + rng() % nu;
    const GreedyResult plain = greedy_maximize(K, pr.config(), k);
    const GreedyResult lazy = lazy_greedy_maximize(K, pr.config(), k);
    CHECK(plain.selected == lazy.selected);
    CHECK(plain.value == doctest::Approx(lazy.value));
    CHECK(lazy.evaluations <= plain.evaluations + k);
  }
}

TEST_CASE("k = 1 evaluates every candidate once") {
  const oracle::Problem pr = oracle::random_problem(3, 25, 2, true, 10);
  CHECK(greedy_maximize(pr.blocks(), pr.config(), 1).evaluations == 25);
  CHECK(lazy_greedy_maximize(pr.blocks(), pr.config(), 1).evaluations == 25);
}

TEST_CASE("lazy greedy saves evaluations on clustered data") {
  const oracle::Problem pr = clustered_problem(120, 4, 11);
  const KernelBlocks K = pr.blocks();
  const GreedyResult plain = greedy_maximize(K, pr.config(), 60);
  const GreedyResult lazy = lazy_greedy_maximize(K, pr.config(), 60);
  CHECK(plain.selected == lazy.selected);
  CHECK(lazy.evaluations < plain.evaluations);
}

TEST_CASE("brute_force_max") {
  std::mt19937_64 rng(12);
  const oracle::Problem three = oracle::random_problem(2, 3, 2, true, 1);
  CHECK(brute_force_max(three.blocks(), three.config(), 3).selected == std::vector<std::size_t>{0, 1, 2});
  const oracle::Problem one = oracle::random_problem(2, 1, 2, true, 2);
  const BruteForceResult single = brute_force_max(one.blocks(), one.config(), 1);
  CHECK(single.selected == std::vector<std::size_t>{0});
  CHECK(single.value == doctest::Approx(oracle::s(one, {true})));
  for (int rep = 0; rep < 10; ++rep) {
    const oracle::Problem pr = oracle::random_problem(3, 10, 3, rep % 2 == 0, rng());
    for (std::size_t k : {std::size_t{2}, std::size_t{5}, std::size_t{8}}) {
      const BruteForceResult b = brute_force_max(pr.blocks(), pr.config(), k);
      const oracle::Best best = oracle::max_s_of_size(pr, k);
      CHECK(b.selected.size() == k);
      CHECK(oracle::rel_diff(b.value, best.value) <= 1e-9);
    }
  }
  const oracle::Problem big = oracle::random_problem(2, 21, 2, true, 3);
  CHECK_THROWS_AS(brute_force_max(big.blocks(), big.config(), 2), InvalidArgument);
}

TEST_CASE("check_submodularity passes with the right d and flags a small one") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 6; ++rep) {
    const oracle::Problem pr = oracle::random_problem(3, 12, 4, rep % 2 == 0, rng());
    KernelBlocks K = pr.blocks();
    const SubmodularityReport ok = check_submodularity(K, pr.config(), 500, rng());
    CHECK(ok.passed());
    CHECK(ok.trials == 500);
    if (rep % 2 == 1) {
      K.d = 0.3 * K.K_uu.maxCoeff();
      CHECK_FALSE(check_submodularity(K, pr.config(), 500, rng()).passed());
    }
  }
}

TEST_CASE("on-demand and dense kernels give the same greedy run") {
  Dataset d;
  d.n_features = 3;
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < 80; ++i) {
    d.samples.push_back({{1, unit(rng)}, {2, unit(rng)}, {3, unit(rng)}});
    d.labels.push_back(i % 3 == 0 ? Label::positive : Label::negative);
    d.labeled_idx.push_back(i);
  }
  const Dataset split = make_split(d, SplitSpec{6, 1, true});
  S3vmConfig cfg;
  cfg.C = 0.8;
  cfg.C_star = 0.3;
  for (KernelKind kind : {KernelKind::linear, KernelKind::rbf}) {
    const KernelSpec spec{kind, 2.0, {}};
    const KernelBlocks K = build_blocks(split, spec);
    const OnDemandKernel lazy_kernel(split, spec);
    const GreedyResult a = greedy_maximize(K, cfg, 30);
    const GreedyResult b = lazy_greedy_maximize(lazy_kernel, cfg, 30);
    CHECK(a.selected == b.selected);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
  }
}

TEST_CASE("solution CSV and trace JSON") {
  const oracle::Problem pr = oracle::random_problem(2, 4, 2, true, 15);
  const GreedyResult g = greedy_maximize(pr.blocks(), pr.config(), 2);
  const std::vector<std::size_t> idx{10, 11, 12, 13};
  const std::string csv = solution_csv(g, idx);
  CHECK(csv.rfind("index,label,round\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 5);
  const std::string first_row = "1" + std::to_string(g.selected[0]) + ",1,0\n";
  CHECK(csv.find(first_row) != std::string::npos);
  CHECK(csv.find(",-1,-1\n") != std::string::npos);

  const nlohmann::json trace = nlohmann::json::parse(trace_json(g, idx));
  REQUIRE(trace.size() == 2);
  CHECK(trace[0]["round"] == 0);
  CHECK(trace[0]["index"] == idx[g.selected[0]]);
  CHECK(trace[1]["value"].get<double>() == doctest::Approx(g.value));
  CHECK(trace[0]["gain"].get<double>() == doctest::Approx(g.gains[0]));
  const std::vector<std::size_t> short_idx{1};
  CHECK_THROWS_AS(solution_csv(g, short_idx), DimensionMismatch);
}
