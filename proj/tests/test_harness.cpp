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

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "s3vm/error.hpp"
#include "s3vm/harness.hpp"
#include "s3vm/verify.hpp"

using namespace s3vm;

namespace {

// Two Gaussian blobs in 4 dimensions, 2:1 class ratio, raw scale 0..50.
Dataset blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 4.0);
  Dataset d;
  d.n_features = 4;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 3 != 0;
    SparseVector x;
    for (std::uint32_t f = 1; f <= 4; ++f) x.push_back({f, (pos ? 30.0 : 15.0) + noise(rng)});
    d.samples.push_back(x);
    d.labels.push_back(pos ? Label::positive : Label::negative);
    d.labeled_idx.push_back(i);
  }
  return d;
}

ExperimentConfig small_config(Method method) {
  ExperimentConfig cfg;
  cfg.dataset = "blobs";
  cfg.method = method;
  cfg.C = 1.0;
  cfg.cstar_over_c = 0.1;
  cfg.n_labeled = 4;
  cfg.splits = 3;
  cfg.seed = 7;
  cfg.svm_epochs = 200;
  cfg.qp_restarts = 3;
  return cfg;
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::svm, Method::qp_s3vm, Method::s_qp_s3vm}) CHECK(parse_method(method_name(m)) == m);
  CHECK(method_name(Method::s_qp_s3vm) == "s-qp-s3vm");
  CHECK(parse_method("qp-s3vm") == Method::qp_s3vm);
  CHECK_THROWS_AS(parse_method("tsvm"), InvalidArgument);
}

TEST_CASE("config_from_entry copies the registry settings") {
  RegistryEntry e;
  e.name = "australian";
  e.C = 0.922;
  e.cstar_over_c = 0.1;
  e.r = 0.44;
  e.n_labeled = 3;
  const ExperimentConfig cfg = config_from_entry(e, Method::qp_s3vm);
  CHECK(cfg.dataset == "australian");
  CHECK(cfg.C == 0.922);
  CHECK(cfg.C_star() == doctest::Approx(0.0922));
  CHECK(cfg.r == 0.44);
  CHECK(cfg.n_labeled == 3);
  CHECK(cfg.method == Method::qp_s3vm);
}

TEST_CASE("experiments are deterministic and share splits across methods") {
  const Dataset data = blobs(60, 1);
  std::vector<ExperimentResult> results;
  for (Method m : {Method::svm, Method::qp_s3vm, Method::s_qp_s3vm}) {
    const ExperimentResult a = run_experiment(data, small_config(m));
    const ExperimentResult b = run_experiment(data, small_config(m));
    REQUIRE(a.runs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.runs[i].accuracy == b.runs[i].accuracy);
      CHECK(a.runs[i].split_seed == 7 + i);
      CHECK(a.runs[i].config == b.runs[i].config);
      CHECK(a.runs[i].accuracy >= 0.0);
      CHECK(a.runs[i].accuracy <= 100.0);
      CHECK(a.runs[i].n_labeled == 4);
      CHECK(a.runs[i].n_unlabeled == 56);
      CHECK(a.runs[i].solver_seconds <= a.runs[i].total_seconds);
    }
    results.push_back(a);
  }
  const Dataset normalized = normalize_features(data);
  for (std::size_t i = 0; i < 3; ++i) {
    const SplitRun svm = run_split(normalized, small_config(Method::svm), i);
    const SplitRun greedy = run_split(normalized, small_config(Method::s_qp_s3vm), i);
    CHECK(svm.split.labeled_idx == greedy.split.labeled_idx);
    CHECK(svm.truth == greedy.truth);
  }
  CHECK(results[0].runs[0].k == 0);
  CHECK(results[1].runs[0].k == results[2].runs[0].k);
}

TEST_CASE("parallel splits give the same reports") {
  const Dataset data = blobs(45, 2);
  ExperimentConfig cfg = small_config(Method::s_qp_s3vm);
  const ExperimentResult serial = run_experiment(data, cfg);
  cfg.parallel_splits = true;
  const ExperimentResult parallel = run_experiment(data, cfg);
  REQUIRE(serial.runs.size() == parallel.runs.size());
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    CHECK(serial.runs[i].accuracy == parallel.runs[i].accuracy);
    CHECK(serial.runs[i].k == parallel.runs[i].k);
  }
}

TEST_CASE("r defaults to the true ratio of U") {
  const Dataset normalized = normalize_features(blobs(60, 3));
  const SplitRun run = run_split(normalized, small_config(Method::s_qp_s3vm), 0);
  std::size_t positives = 0;
  for (Label l : run.truth) positives += l == Label::positive ? 1 : 0;
  CHECK(run.report.k == positive_count(positive_ratio(run.truth), run.truth.size()));
  CHECK(run.report.k == positives);
  REQUIRE(run.greedy.has_value());
  CHECK(run.greedy->selected.size() == run.report.k);

  ExperimentConfig fixed = small_config(Method::qp_s3vm);
  fixed.r = 0.25;
  const SplitRun qp = run_split(normalized, fixed, 0);
  CHECK(qp.report.k == 14);
  REQUIRE(qp.soft.has_value());
  CHECK(qp.soft->p.sum() == doctest::Approx(14.0).epsilon(1e-9));
  std::size_t predicted = 0;
  for (Label l : qp.labels) predicted += l == Label::positive ? 1 : 0;
  CHECK(predicted == 14);
}

TEST_CASE("qp-s3vm refuses more unlabeled samples than the cap") {
  const Dataset normalized = normalize_features(blobs(60, 4));
  ExperimentConfig cfg = small_config(Method::qp_s3vm);
  cfg.k_cap = 50;
  CHECK_THROWS_AS(run_split(normalized, cfg, 0), InvalidArgument);
  cfg.method = Method::s_qp_s3vm;
  CHECK_NOTHROW(run_split(normalized, cfg, 0));
}

TEST_CASE("config echo lists the settings") {
  const Dataset normalized = normalize_features(blobs(30, 5));
  ExperimentConfig cfg = small_config(Method::s_qp_s3vm);
  cfg.C = 0.922;
  const SplitRun run = run_split(normalized, cfg, 1);
  CHECK(run.report.config.find("0.922") != std::string::npos);
  CHECK(run.report.config.find("s-qp-s3vm") != std::string::npos);
  CHECK(run.report.config.find("seed=8") != std::string::npos);
}

TEST_CASE("report formats") {
  const Dataset data = blobs(30, 6);
  std::vector<ExperimentResult> results{run_experiment(data, small_config(Method::svm)),
                                        run_experiment(data, small_config(Method::s_qp_s3vm))};
  const std::string csv = reports_csv(results);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "dataset,method,split_seed,accuracy,solver_seconds,total_seconds,n_labeled,n_unlabeled,k");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("blobs,", 0) == 0);
  }
  CHECK(rows == 6);

  const nlohmann::json j = nlohmann::json::parse(reports_json(results));
  CHECK(j.dump().find("s-qp-s3vm") != std::string::npos);
  const std::string table = format_table(results);
  CHECK(table.find("blobs") != std::string::npos);
  CHECK(table.find("svm") != std::string::npos);

  SoftLabels P;
  P.p = Eigen::Vector2d(0.25, 1.0);
  const std::vector<std::size_t> idx{3, 9};
  CHECK(soft_labels_csv(P, idx) == "index,p\n3,0.25\n9,1\n");
}

TEST_CASE("fixtures") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FixtureSpec spec;
    spec.seed = seed;
    spec.kind = seed % 2 == 0 ? KernelKind::rbf : KernelKind::linear;
    spec.clusters = seed % 4 == 3 ? 3 : 0;
    const Fixture f = make_fixture(spec);
    CHECK(f.data.labeled_idx.size() == 4);
    CHECK(f.data.unlabeled_idx.size() == 10);
    CHECK(f.truth.size() == 10);
    CHECK(f.K.n_unlabeled() == 10);
    CHECK_NOTHROW(validate_blocks(f.K));
    CHECK(f.cfg.C >= 0.1);
    CHECK(f.cfg.C <= 10.0);
    CHECK(f.cfg.C_star >= 0.1);
    CHECK(f.cfg.C_star <= 10.0);
    CHECK(f.cfg.r == doctest::Approx(positive_ratio(f.truth)));
    CHECK(f.k >= 1);
    CHECK(f.k <= 10);
    bool pos = false;
    bool neg = false;
    for (std::size_t i : f.data.labeled_idx) {
      pos |= f.data.labels[i] == Label::positive;
      neg |= f.data.labels[i] == Label::negative;
    }
    CHECK(pos);
    CHECK(neg);
  }
}

TEST_CASE("random soft labels and dual points are feasible") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t k = 1 + rng() % n;
    const SoftLabels P = random_soft_labels(n, k, rng);
    CHECK(P.p.sum() == doctest::Approx(static_cast<double>(k)).epsilon(1e-9));
    CHECK(P.p.minCoeff() >= 0.0);
    CHECK(P.p.maxCoeff() <= 1.0);
    S3vmConfig cfg;
    cfg.C = 0.5;
    cfg.C_star = 2.0;
    const DualPoint dp = sample_feasible_dual(P, cfg, 3, rng);
    CHECK(dp.alpha.size() == 3);
    CHECK(is_feasible(dp, P, cfg));
  }
}

TEST_CASE("small verify suites pass") {
  CHECK(verify_theorem3(1, 4, 200).passed());
  CHECK(verify_greedy(1, 4).passed());
  CHECK(verify_equivalence(1, 3).passed());
  CHECK(verify_vertex(1, 5).passed());
  CHECK(verify_incremental(1, 200).passed());
  const VerifyReport r = verify_theorem3(2, 3, 100);
  const nlohmann::json j = r.to_json();
  CHECK(j["suite"] == r.suite);
  CHECK(j["passed"] == true);
  CHECK_THROWS_AS(run_verify("nonsense", 0), InvalidArgument);
}
