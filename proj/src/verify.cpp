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

#include "s3vm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "s3vm/error.hpp"
#include "s3vm/submodular.hpp"
#include "s3vm/svm.hpp"

namespace s3vm {
namespace {

constexpr double kTol = 1e-9;

using Clock = std::chrono::steady_clock;

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

double rel_scale(std::initializer_list<double> values) {
  double s = 1.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

SparseVector to_sparse(const std::vector<double>& x) {
  SparseVector v;
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (x[f] != 0.0) v.push_back({static_cast<std::uint32_t>(f + 1), x[f]});
  }
  return v;
}

// Random fixture shapes shared by the small-|U| suites.
FixtureSpec small_spec(std::mt19937_64& rng, std::size_t index, std::size_t min_u, std::size_t max_u) {
  FixtureSpec spec;
  spec.kind = index % 2 == 0 ? KernelKind::rbf : KernelKind::linear;
  spec.n_labeled = uniform_size(rng, 2, 6);
  spec.n_unlabeled = uniform_size(rng, min_u, max_u);
  spec.dim = uniform_size(rng, 2, 5);
  spec.gamma = log_uniform(rng, 0.3, 5.0);
  spec.seed = rng();
  return spec;
}

std::string fixture_name(const Fixture& fx) {
  return fx.spec.describe() + " |L|=" + std::to_string(fx.K.n_labeled()) + " |U|=" +
         std::to_string(fx.K.n_unlabeled());
}

SoftLabels indicator(std::span<const std::size_t> A, std::size_t n) {
  SoftLabels P{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
  for (std::size_t j : A) P.p[static_cast<Eigen::Index>(j)] = 1.0;
  return P;
}

std::vector<std::size_t> mask_members(std::uint32_t mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (mask >> j & 1U) out.push_back(j);
  }
  return out;
}

template <typename Fn>
VerifyReport timed(std::string suite, std::uint64_t seed, Fn&& fn) {
  const auto start = Clock::now();
  VerifyReport report;
  report.suite = std::move(suite);
  report.seed = seed;
  fn(report);
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace

Fixture make_fixture(const FixtureSpec& spec) {
  if (spec.n_labeled < 2 || spec.n_unlabeled < 2 || spec.dim == 0) {
    throw InvalidArgument("make_fixture: needs |L| >= 2, |U| >= 2 and dim >= 1");
  }
  const std::size_t n = spec.n_labeled + spec.n_unlabeled;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::uint64_t attempt = 0;; ++attempt) {
    Dataset full;
    full.n_features = spec.dim;
    std::vector<std::vector<double>> points(n, std::vector<double>(spec.dim));
    if (spec.clusters == 0) {
      std::vector<double> w(spec.dim);
      for (double& v : w) v = normal(rng);
      std::vector<double> proj(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < spec.dim; ++f) {
          points[i][f] = unit(rng);
          proj[i] += w[f] * points[i][f];
        }
      }
      std::vector<double> sorted = proj;
      std::sort(sorted.begin(), sorted.end());
      const double q = 0.3 + 0.4 * unit(rng);
      const double threshold = sorted[std::min(n - 1, static_cast<std::size_t>(q * static_cast<double>(n)))];
      for (std::size_t i = 0; i < n; ++i) full.labels.push_back(proj[i] >= threshold ? Label::positive : Label::negative);
    } else {
      std::vector<std::vector<double>> centers(spec.clusters, std::vector<double>(spec.dim));
      for (auto& c : centers) {
        for (double& v : c) v = 0.15 + 0.7 * unit(rng);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = uniform_size(rng, 0, spec.clusters - 1);
        for (std::size_t f = 0; f < spec.dim; ++f) points[i][f] = std::clamp(centers[c][f] + 0.05 * normal(rng), 0.0, 1.0);
        full.labels.push_back(c % 2 == 0 ? Label::positive : Label::negative);
      }
    }
    for (const auto& x : points) full.samples.push_back(to_sparse(x));
    full.labeled_idx.resize(n);
    std::iota(full.labeled_idx.begin(), full.labeled_idx.end(), std::size_t{0});

    const bool has_pos = std::count(full.labels.begin(), full.labels.end(), Label::positive) >= 2;
    const bool has_neg = std::count(full.labels.begin(), full.labels.end(), Label::negative) >= 2;
    if (!has_pos || !has_neg) continue;

    Fixture fx;
    fx.data = make_split(full, SplitSpec{spec.n_labeled, spec.seed + attempt, true});
    fx.truth = unlabeled_truth(full, fx.data);
    const double r = positive_ratio(fx.truth);
    if (r == 0.0 || r == 1.0) continue;
    fx.spec.kind = spec.kind;
    fx.spec.gamma = spec.gamma;
    fx.K = build_blocks(fx.data, fx.spec);
    fx.cfg.C = log_uniform(rng, 0.1, 10.0);
    fx.cfg.C_star = log_uniform(rng, 0.1, 10.0);
    fx.cfg.r = r;
    fx.cfg.seed = spec.seed;
    fx.k = positive_count(r, spec.n_unlabeled);
    return fx;
  }
}

SoftLabels random_soft_labels(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = unit(rng);
  return SoftLabels{project_capped_simplex(v, static_cast<double>(k))};
}

DualPoint sample_feasible_dual(const SoftLabels& P, const S3vmConfig& cfg, std::size_t n_labeled,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double hi) {
    const double u = unit(rng);
    if (u < 0.25) return 0.0;
    if (u < 0.5) return hi;
    return hi * unit(rng);
  };
  const Eigen::Index nu = P.p.size();
  DualPoint dp{Eigen::VectorXd(static_cast<Eigen::Index>(n_labeled)), Eigen::VectorXd(nu), Eigen::VectorXd(nu)};
  for (Eigen::Index i = 0; i < dp.alpha.size(); ++i) dp.alpha[i] = draw(cfg.C);
  for (Eigen::Index j = 0; j < nu; ++j) {
    dp.gamma[j] = draw(cfg.C_star * P.p[j]);
    dp.beta[j] = draw(cfg.C_star * (1.0 - P.p[j]));
  }
  return dp;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json out{{"suite", suite}, {"seed", seed}, {"passed", passed()}, {"seconds", seconds}};
  nlohmann::json list = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"samples", c.samples},
                    {"max_violation", c.max_violation},
                    {"detail", c.detail}});
  }
  out["checks"] = std::move(list);
  return out;
}

VerifyReport verify_theorem3(std::uint64_t seed, std::size_t fixtures, std::size_t trials) {
  return timed("theorem3", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    CheckResult mono{"monotone"};
    CheckResult sub{"submodular"};
    CheckResult empty{"empty_set_zero"};
    CheckResult closed{"gain_difference_closed_form"};
    CheckResult printed_gain{"printed_gain_at_d1"};
    std::size_t rbf_fixtures = 0;
    std::size_t linear_fixtures = 0;

    for (std::size_t f = 0; f < fixtures; ++f) {
      const Fixture fx = make_fixture(small_spec(rng, f, 5, 15));
      (fx.spec.kind == KernelKind::rbf ? rbf_fixtures : linear_fixtures)++;
      const SubmodularityReport sr = check_submodularity(fx.K, fx.cfg, trials, rng());
      mono.samples += sr.trials;
      sub.samples += sr.trials;
      mono.max_violation = std::max(mono.max_violation, sr.max_monotonicity_violation);
      sub.max_violation = std::max(sub.max_violation, sr.max_submodularity_violation);

      const double s_empty = s_value(std::span<const std::size_t>{}, fx.K, fx.cfg);
      empty.samples++;
      empty.max_violation = std::max(empty.max_violation, std::abs(s_empty));

      // gain(A, m) - gain(A + q, m) = C*^2 (d - K[q, m]), and at d = 1 the
      // printed single-gain expression.
      const std::size_t nu = fx.K.n_unlabeled();
      const std::size_t nl = fx.K.n_labeled();
      const double cs = fx.cfg.C_star;
      const double cs2 = cs * cs;
      std::vector<std::size_t> perm(nu);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t t = 0; t < 50; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::size_t a = uniform_size(rng, 0, nu - 2);
        std::vector<std::size_t> A(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(a));
        const std::size_t q = perm[a];
        const std::size_t m = perm[a + 1];
        std::vector<std::size_t> Am = A, Aq = A, Aqm = A;
        Am.push_back(m);
        Aq.push_back(q);
        Aqm.push_back(q);
        Aqm.push_back(m);
        const double sA = s_value(A, fx.K, fx.cfg);
        const double sAm = s_value(Am, fx.K, fx.cfg);
        const double sAq = s_value(Aq, fx.K, fx.cfg);
        const double sAqm = s_value(Aqm, fx.K, fx.cfg);
        const double lhs = (sAm - sA) - (sAqm - sAq);
        const double rhs = cs2 * (fx.K.d - fx.K.K_uu(q, m));
        closed.samples++;
        closed.max_violation =
            std::max(closed.max_violation, std::abs(lhs - rhs) / rel_scale({sA, sAm, sAq, sAqm}));

        if (fx.spec.kind == KernelKind::rbf) {
          double sum_a = 0.0;
          for (std::size_t j : A) sum_a += fx.K.K_uu(m, j);
          const double printed = -0.5 * cs2 * fx.K.rowsum_uu[m] + fx.cfg.C * cs * fx.K.ylabelsum_lu[m] +
                                 cs2 * sum_a - cs2 * static_cast<double>(a) + 0.5 * cs2 * (fx.K.K_uu(m, m) - 1.0) +
                                 1.5 * cs2 * static_cast<double>(nu) + fx.cfg.C * cs * static_cast<double>(nl);
          printed_gain.samples++;
          printed_gain.max_violation =
              std::max(printed_gain.max_violation, std::abs(printed - (sAm - sA)) / rel_scale({sA, sAm}));
        }
      }
    }
    mono.passed = mono.max_violation <= kTol;
    sub.passed = sub.max_violation <= kTol;
    empty.passed = empty.max_violation == 0.0;
    closed.passed = closed.max_violation <= kTol;
    printed_gain.passed = printed_gain.max_violation <= kTol;
    mono.detail = {{"fixtures", fixtures}, {"rbf_fixtures", rbf_fixtures}, {"linear_fixtures", linear_fixtures},
                   {"trials_per_fixture", trials}};
    sub.detail = mono.detail;

    // With d below the largest kernel entry the diminishing-returns margin
    // C*^2 (d - K[q, m]) turns negative; the checker has to see it.
    CheckResult adversarial{"checker_flags_small_d"};
    FixtureSpec spec;
    spec.kind = KernelKind::linear;
    spec.n_labeled = 3;
    spec.n_unlabeled = 12;
    spec.dim = 4;
    spec.seed = rng();
    Fixture fx = make_fixture(spec);
    fx.K.d = 0.25 * fx.K.K_uu.maxCoeff();
    const SubmodularityReport bad = check_submodularity(fx.K, fx.cfg, trials, rng());
    adversarial.samples = bad.trials;
    adversarial.max_violation = bad.max_submodularity_violation;
    adversarial.passed = !bad.passed();
    adversarial.detail = {{"d", fx.K.d}, {"max_kernel_entry", fx.K.K_uu.maxCoeff()},
                          {"expected", "violations reported"}};

    report.checks = {mono, sub, empty, closed, printed_gain, adversarial};
  });
}

VerifyReport verify_greedy(std::uint64_t seed, std::size_t fixtures) {
  return timed("greedy", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    const double bound = 1.0 - std::exp(-1.0);
    CheckResult ratio{"greedy_ratio"};
    double min_ratio = std::numeric_limits<double>::infinity();
    double sum_ratio = 0.0;
    std::size_t exact = 0;
    bool size_ok = true;
    for (std::size_t f = 0; f < fixtures; ++f) {
      const Fixture fx = make_fixture(small_spec(rng, f, 4, 12));
      const GreedyResult g = greedy_maximize(fx.K, fx.cfg, fx.k);
      const BruteForceResult opt = brute_force_max(fx.K, fx.cfg, fx.k);
      size_ok = size_ok && opt.selected.size() == fx.k;
      const double q = g.value / opt.value;
      min_ratio = std::min(min_ratio, q);
      sum_ratio += q;
      if (std::abs(g.value - opt.value) <= kTol * rel_scale({opt.value})) ++exact;
      ratio.samples++;
      ratio.max_violation = std::max(ratio.max_violation, bound - q);
    }
    ratio.passed = min_ratio >= bound && size_ok;
    ratio.detail = {{"min_ratio", min_ratio},
                    {"mean_ratio", sum_ratio / static_cast<double>(fixtures)},
                    {"bound", bound},
                    {"greedy_optimal", exact},
                    {"optimum_has_size_k", size_ok}};
    report.checks = {ratio};
  });
}

VerifyReport verify_theorem1(std::uint64_t seed, std::size_t fixtures, std::size_t samples) {
  return timed("theorem1", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    CheckResult bound{"dual_below_upper_bound"};
    std::size_t violations = 0;
    std::size_t fixtures_violated = 0;
    nlohmann::json worst;
    for (std::size_t f = 0; f < fixtures; ++f) {
      FixtureSpec spec = small_spec(rng, 1, 4, 15);
      const Fixture fx = make_fixture(spec);
      const double i_wstar = train_supervised(fx.data, fx.cfg.C, SvmOptions{2000, fx.cfg.seed}).objective;
      std::size_t here = 0;
      for (std::size_t s = 0; s < samples; ++s) {
        SoftLabels P = random_soft_labels(fx.K.n_unlabeled(), fx.k, rng);
        if (s % 2 == 1) P.p = P.p.unaryExpr([](double v) { return v >= 0.5 ? 1.0 : 0.0; });
        const DualPoint dp = sample_feasible_dual(P, fx.cfg, fx.K.n_labeled(), rng);
        const double dual = dual_objective(dp, P, fx.K, fx.cfg);
        const double ub = upper_bound(P, fx.K, fx.cfg, i_wstar);
        bound.samples++;
        const double excess = dual - ub;
        if (excess > kTol) {
          ++violations;
          ++here;
        }
        if (excess > bound.max_violation || worst.is_null()) {
          bound.max_violation = std::max(bound.max_violation, excess);
          worst = {{"fixture", fixture_name(fx)}, {"dual", dual}, {"upper_bound", ub}, {"i_wstar", i_wstar}};
        }
      }
      if (here > 0) ++fixtures_violated;
    }
    bound.passed = violations == 0;
    bound.detail = {{"fixtures", fixtures},
                    {"samples_per_fixture", samples},
                    {"violations", violations},
                    {"fixtures_with_violations", fixtures_violated},
                    {"worst", worst}};
    report.checks = {bound};
  });
}

VerifyReport verify_equivalence(std::uint64_t seed, std::size_t fixtures) {
  return timed("equivalence", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    CheckResult pairs{"equal_size_differences"};
    CheckResult argmax{"maximizer_matches_qp_minimizer"};
    std::size_t ties = 0;
    for (std::size_t f = 0; f < fixtures; ++f) {
      const Fixture fx = make_fixture(small_spec(rng, f, 4, 10));
      const std::size_t nu = fx.K.n_unlabeled();
      std::vector<std::vector<std::uint32_t>> by_size(nu + 1);
      std::vector<double> s(std::size_t{1} << nu);
      std::vector<double> q(s.size());
      for (std::uint32_t mask = 0; mask < s.size(); ++mask) {
        const std::vector<std::size_t> A = mask_members(mask, nu);
        s[mask] = s_value(A, fx.K, fx.cfg);
        q[mask] = qp_objective_standard(indicator(A, nu), fx.K, fx.cfg);
        by_size[A.size()].push_back(mask);
      }
      for (const auto& group : by_size) {
        for (std::size_t x = 0; x < group.size(); ++x) {
          for (std::size_t y = x + 1; y < group.size(); ++y) {
            const std::uint32_t a = group[x];
            const std::uint32_t b = group[y];
            const double dev = std::abs((s[a] - s[b]) + (q[a] - q[b])) / rel_scale({s[a], s[b], q[a], q[b]});
            pairs.samples++;
            pairs.max_violation = std::max(pairs.max_violation, dev);
          }
        }
      }

      const BruteForceResult best = brute_force_max(fx.K, fx.cfg, fx.k);
      const VertexMinimum vm = vertex_minimum(fx.K, fx.cfg, fx.k);
      std::vector<std::size_t> qp_set;
      for (std::size_t j = 0; j < nu; ++j) {
        if (vm.labels.p[static_cast<Eigen::Index>(j)] == 1.0) qp_set.push_back(j);
      }
      argmax.samples++;
      if (qp_set != best.selected) {
        const double qp_at_best = qp_objective(indicator(best.selected, nu), fx.K, fx.cfg);
        const double dev = std::abs(qp_at_best - vm.objective) / rel_scale({vm.objective});
        argmax.max_violation = std::max(argmax.max_violation, dev);
        if (dev <= kTol) ++ties;
        else argmax.max_violation = std::max(argmax.max_violation, 1.0);
      }
    }
    pairs.passed = pairs.max_violation <= kTol;
    argmax.passed = argmax.max_violation <= kTol;
    argmax.detail = {{"fixtures", fixtures}, {"tied_optima", ties}};
    report.checks = {pairs, argmax};
  });
}

VerifyReport verify_vertex(std::uint64_t seed, std::size_t fixtures) {
  return timed("vertex", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    CheckResult lower{"vertex_lower_bounds_solver"};
    CheckResult attain{"solver_attains_vertex"};
    std::size_t hits = 0;
    nlohmann::json gaps = nlohmann::json::array();
    for (std::size_t f = 0; f < fixtures; ++f) {
      Fixture fx = make_fixture(small_spec(rng, f, 4, 12));
      fx.cfg.restarts = 20;
      const VertexMinimum vm = vertex_minimum(fx.K, fx.cfg, fx.k);
      const QpSolution sol = solve_qp(fx.K, fx.cfg);
      const double scale = rel_scale({vm.objective});
      lower.samples++;
      lower.max_violation = std::max(lower.max_violation, (vm.objective - sol.objective) / scale);
      const double gap = (sol.objective - vm.objective) / scale;
      if (gap <= kTol) ++hits;
      gaps.push_back(gap);
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(fixtures);
    lower.passed = lower.max_violation <= kTol;
    attain.samples = fixtures;
    attain.passed = rate >= 0.8;
    attain.max_violation = std::max(0.0, 0.8 - rate);
    attain.detail = {{"attainment_rate", rate}, {"required", 0.8}, {"restarts", 20}, {"relative_gaps", gaps}};
    report.checks = {lower, attain};
  });
}

VerifyReport verify_incremental(std::uint64_t seed, std::size_t max_unlabeled) {
  return timed("incremental", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    CheckResult gain_check{"gain_matches_s_difference"};
    CheckResult value_check{"running_value_drift"};
    CheckResult sum_check{"sum_a_matches_direct"};
    nlohmann::json runs = nlohmann::json::array();
    std::vector<std::size_t> sizes;
    for (std::size_t n : {std::size_t{50}, std::size_t{200}, std::size_t{1000}, std::size_t{2000}}) {
      if (n <= max_unlabeled) sizes.push_back(n);
    }
    if (sizes.empty() || sizes.back() != max_unlabeled) sizes.push_back(max_unlabeled);

    for (std::size_t f = 0; f < sizes.size(); ++f) {
      FixtureSpec spec;
      spec.kind = f % 2 == 0 ? KernelKind::rbf : KernelKind::linear;
      spec.n_labeled = 10;
      spec.n_unlabeled = sizes[f];
      spec.dim = 5;
      spec.gamma = 2.0;
      spec.seed = rng();
      Fixture fx = make_fixture(spec);
      fx.cfg.r = 0.1;
      const std::size_t k = positive_count(fx.cfg.r, fx.K.n_unlabeled());
      const std::size_t nu = fx.K.n_unlabeled();
      std::vector<std::size_t> remaining;

      const RoundObserver audit = [&](const SelectionState& state, std::size_t, std::size_t chosen) {
        const std::vector<std::size_t>& A = state.selected();
        const double sA = s_value(A, fx.K, fx.cfg);
        value_check.samples++;
        value_check.max_violation = std::max(value_check.max_violation, std::abs(state.value() - sA) / rel_scale({sA}));

        remaining.clear();
        for (std::size_t m = 0; m < nu; ++m) {
          if (!state.contains(m) && m != chosen) remaining.push_back(m);
        }
        const std::size_t n_audit = std::max<std::size_t>(1, (remaining.size() + 99) / 100);
        std::shuffle(remaining.begin(), remaining.end(), rng);
        remaining.resize(std::min(n_audit, remaining.size()));
        remaining.push_back(chosen);

        std::vector<std::size_t> Am = A;
        Am.push_back(0);
        for (std::size_t m : remaining) {
          Am.back() = m;
          const double sAm = s_value(Am, fx.K, fx.cfg);
          gain_check.samples++;
          gain_check.max_violation =
              std::max(gain_check.max_violation, std::abs(state.gain(m) - (sAm - sA)) / rel_scale({sA, sAm}));
          double direct = 0.0;
          for (std::size_t j : A) direct += fx.K.K_uu(j, m);
          sum_check.samples++;
          sum_check.max_violation = std::max(sum_check.max_violation, std::abs(state.sum_a(m) - direct));
        }
      };
      const GreedyResult g = greedy_maximize(fx.K, fx.cfg, k, audit);
      runs.push_back({{"fixture", fixture_name(fx)}, {"rounds", k}, {"value", g.value}});
    }
    gain_check.passed = gain_check.max_violation <= kTol;
    value_check.passed = value_check.max_violation <= 1e-6;
    sum_check.passed = sum_check.max_violation <= kTol;
    gain_check.detail = {{"runs", runs}, {"audit_fraction", 0.01}};
    value_check.detail = {{"tolerance", 1e-6}};
    report.checks = {gain_check, value_check, sum_check};
  });
}

VerifyReport verify_lazy(std::uint64_t seed, const std::vector<NamedSplit>& extra) {
  return timed("lazy", seed, [&](VerifyReport& report) {
    std::mt19937_64 rng(seed);
    CheckResult same{"lazy_matches_plain"};
    CheckResult fewer{"lazy_saves_evaluations"};
    nlohmann::json cases = nlohmann::json::array();
    std::size_t mismatches = 0;
    bool saved_on_clustered = false;

    auto compare = [&](const std::string& name, const UnlabeledKernel& kernel, const S3vmConfig& cfg, std::size_t k,
                       bool clustered) {
      const GreedyResult plain = greedy_maximize(kernel, cfg, k);
      const GreedyResult lazy = lazy_greedy_maximize(kernel, cfg, k);
      const bool equal = plain.selected == lazy.selected;
      same.samples++;
      if (!equal) ++mismatches;
      if (clustered && lazy.evaluations < plain.evaluations) saved_on_clustered = true;
      cases.push_back({{"case", name},
                       {"clustered", clustered},
                       {"k", k},
                       {"identical", equal},
                       {"plain_evaluations", plain.evaluations},
                       {"lazy_evaluations", lazy.evaluations}});
    };

    for (std::size_t f = 0; f < 12; ++f) {
      const Fixture fx = make_fixture(small_spec(rng, f, 5, 200));
      compare(fixture_name(fx), DenseUnlabeledKernel(fx.K), fx.cfg, fx.k, false);
    }
    for (std::size_t f = 0; f < 6; ++f) {
      FixtureSpec spec;
      spec.kind = f % 2 == 0 ? KernelKind::rbf : KernelKind::linear;
      spec.n_labeled = 4;
      spec.n_unlabeled = uniform_size(rng, 200, 600);
      spec.dim = 3;
      spec.gamma = 10.0;
      spec.clusters = uniform_size(rng, 2, 8);
      spec.seed = rng();
      const Fixture fx = make_fixture(spec);
      compare("clustered " + fixture_name(fx), DenseUnlabeledKernel(fx.K), fx.cfg, fx.k, true);
    }
    {
      FixtureSpec spec;
      spec.kind = KernelKind::linear;
      spec.n_labeled = 3;
      spec.n_unlabeled = 687;
      spec.dim = 14;
      spec.seed = rng();
      Fixture fx = make_fixture(spec);
      fx.cfg.C = 0.922;
      fx.cfg.C_star = 0.0922;
      fx.cfg.r = 0.44;
      const OnDemandKernel kernel(fx.data, fx.spec);
      compare("australian-sized synthetic", kernel, fx.cfg, positive_count(0.44, 687), false);
    }
    for (const NamedSplit& ns : extra) {
      const OnDemandKernel kernel(ns.split, ns.kernel);
      compare(ns.name, kernel, ns.cfg, positive_count(ns.cfg.r, ns.split.unlabeled_idx.size()), false);
    }
    same.passed = mismatches == 0;
    same.max_violation = static_cast<double>(mismatches);
    same.detail = {{"cases", cases}};
    fewer.samples = 6;
    fewer.passed = saved_on_clustered;
    report.checks = {same, fewer};
  });
}

std::vector<VerifyReport> run_verify(std::string_view suite, std::uint64_t seed) {
  const bool all = suite == "all";
  std::vector<VerifyReport> out;
  if (all || suite == "theorem3") out.push_back(verify_theorem3(seed));
  if (all || suite == "greedy") out.push_back(verify_greedy(seed));
  if (all || suite == "theorem1") out.push_back(verify_theorem1(seed));
  if (all || suite == "equivalence") out.push_back(verify_equivalence(seed));
  if (all || suite == "vertex") out.push_back(verify_vertex(seed));
  if (all || suite == "incremental") out.push_back(verify_incremental(seed));
  if (all || suite == "lazy") out.push_back(verify_lazy(seed));
  if (out.empty()) {
    throw InvalidArgument("unknown verify suite '" + std::string(suite) +
                          "' (all, theorem1, theorem3, greedy, equivalence, vertex, incremental, lazy)");
  }
  return out;
}

}  // namespace s3vm
