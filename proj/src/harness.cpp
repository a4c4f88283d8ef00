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

#include "s3vm/harness.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "s3vm/error.hpp"
#include "s3vm/parallel.hpp"
#include "s3vm/svm.hpp"

namespace s3vm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double accuracy_percent(std::span<const Label> predicted, std::span<const Label> truth) {
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) hits += predicted[j] == truth[j] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::svm:
      return "svm";
    case Method::qp_s3vm:
      return "qp-s3vm";
    case Method::s_qp_s3vm:
      return "s-qp-s3vm";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "svm") return Method::svm;
  if (name == "qp-s3vm") return Method::qp_s3vm;
  if (name == "s-qp-s3vm") return Method::s_qp_s3vm;
  throw InvalidArgument("unknown method '" + std::string(name) + "' (svm, qp-s3vm, s-qp-s3vm)");
}

ExperimentConfig config_from_entry(const RegistryEntry& entry, Method method) {
  ExperimentConfig cfg;
  cfg.dataset = entry.name;
  cfg.method = method;
  cfg.C = entry.C;
  cfg.cstar_over_c = entry.cstar_over_c;
  cfg.r = entry.r;
  cfg.n_labeled = entry.n_labeled;
  return cfg;
}

SplitRun run_split(const Dataset& normalized, const ExperimentConfig& cfg, std::size_t split_index) {
  const auto start = Clock::now();
  SplitRun run;
  RunReport& rep = run.report;
  rep.dataset = cfg.dataset;
  rep.method = cfg.method;
  rep.split_seed = cfg.seed + split_index;

  run.split = make_split(normalized, SplitSpec{cfg.n_labeled, rep.split_seed, true});
  run.truth = unlabeled_truth(normalized, run.split);
  rep.n_labeled = run.split.labeled_idx.size();
  rep.n_unlabeled = run.split.unlabeled_idx.size();

  std::ostringstream echo;
  echo << "dataset=" << cfg.dataset << " method=" << method_name(cfg.method) << " C=" << shortest(cfg.C)
       << " Cstar=" << shortest(cfg.C_star()) << " labeled=" << cfg.n_labeled << " seed=" << rep.split_seed;

  if (cfg.method == Method::svm) {
    echo << " kernel=linear epochs=" << cfg.svm_epochs;
    const auto solve_start = Clock::now();
    const SvmFit fit = train_supervised(run.split, cfg.C, SvmOptions{cfg.svm_epochs, rep.split_seed});
    run.labels.reserve(rep.n_unlabeled);
    for (std::size_t j : run.split.unlabeled_idx) run.labels.push_back(predict(fit.model, run.split.samples[j]));
    rep.solver_seconds = seconds_since(solve_start);
  } else {
    const double r = cfg.r ? *cfg.r : positive_ratio(run.truth);
    S3vmConfig scfg;
    scfg.C = cfg.C;
    scfg.C_star = cfg.C_star();
    scfg.r = r;
    scfg.restarts = cfg.qp_restarts;
    scfg.seed = rep.split_seed;
    rep.k = positive_count(r, rep.n_unlabeled);
    if (rep.k < 1 || rep.k > rep.n_unlabeled) {
      throw InvalidArgument("r=" + shortest(r) + " gives k=" + std::to_string(rep.k) + " outside [1, |U|]");
    }
    echo << " r=" << shortest(r) << " k=" << rep.k << " kernel=" << cfg.kernel.describe();

    if (cfg.method == Method::qp_s3vm) {
      if (rep.n_unlabeled > cfg.k_cap) {
        throw InvalidArgument("qp-s3vm: |U| = " + std::to_string(rep.n_unlabeled) + " exceeds the cap of " +
                              std::to_string(cfg.k_cap) + " (raise --k-cap)");
      }
      const KernelBlocks K = build_blocks(run.split, cfg.kernel);
      echo << " d=" << shortest(K.d) << " restarts=" << cfg.qp_restarts;
      const auto solve_start = Clock::now();
      QpSolution sol = solve_qp(K, scfg);
      run.labels = round_to_labels(sol.labels, rep.k);
      rep.solver_seconds = seconds_since(solve_start);
      run.soft = std::move(sol.labels);
    } else {
      const OnDemandKernel kernel(run.split, cfg.kernel);
      echo << " d=" << shortest(kernel.bound()) << " greedy=" << (cfg.lazy ? "lazy" : "plain");
      const auto solve_start = Clock::now();
      GreedyResult g = cfg.lazy ? lazy_greedy_maximize(kernel, scfg, rep.k) : greedy_maximize(kernel, scfg, rep.k);
      rep.solver_seconds = seconds_since(solve_start);
      run.labels = g.labels;
      run.greedy = std::move(g);
    }
  }
  rep.accuracy = accuracy_percent(run.labels, run.truth);
  rep.config = echo.str();
  rep.total_seconds = seconds_since(start);
  return run;
}

ExperimentResult run_experiment(const Dataset& full, const ExperimentConfig& cfg) {
  if (cfg.splits == 0) throw InvalidArgument("run_experiment: splits must be positive");
  const Dataset normalized = normalize_features(full);
  ExperimentResult result;
  result.runs.resize(cfg.splits);
  if (cfg.parallel_splits) {
    parallel_chunks(cfg.splits, 1, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) result.runs[i] = run_split(normalized, cfg, i).report;
    });
  } else {
    for (std::size_t i = 0; i < cfg.splits; ++i) result.runs[i] = run_split(normalized, cfg, i).report;
  }
  for (const RunReport& r : result.runs) {
    result.mean_accuracy += r.accuracy;
    result.mean_solver_seconds += r.solver_seconds;
    result.mean_total_seconds += r.total_seconds;
  }
  const double n = static_cast<double>(result.runs.size());
  result.mean_accuracy /= n;
  result.mean_solver_seconds /= n;
  result.mean_total_seconds /= n;
  return result;
}

std::string format_table(std::span<const ExperimentResult> results) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-10s %6s %10s %12s %12s\n", "dataset", "method", "splits",
                "accuracy", "solver_s", "total_s");
  out += line;
  for (const ExperimentResult& r : results) {
    if (r.runs.empty()) continue;
    const RunReport& first = r.runs.front();
    std::snprintf(line, sizeof(line), "%-16s %-10s %6zu %10.2f %12.6f %12.6f\n", first.dataset.c_str(),
                  std::string(method_name(first.method)).c_str(), r.runs.size(), r.mean_accuracy,
                  r.mean_solver_seconds, r.mean_total_seconds);
    out += line;
  }
  return out;
}

std::string reports_csv(std::span<const ExperimentResult> results) {
  std::ostringstream out;
  out << "dataset,method,split_seed,accuracy,solver_seconds,total_seconds,n_labeled,n_unlabeled,k\n";
  for (const ExperimentResult& r : results) {
    for (const RunReport& run : r.runs) {
      out << run.dataset << ',' << method_name(run.method) << ',' << run.split_seed << ',' << shortest(run.accuracy)
          << ',' << shortest(run.solver_seconds) << ',' << shortest(run.total_seconds) << ',' << run.n_labeled << ','
          << run.n_unlabeled << ',' << run.k << '\n';
    }
  }
  return out.str();
}

std::string reports_json(std::span<const ExperimentResult> results) {
  nlohmann::json doc = nlohmann::json::array();
  for (const ExperimentResult& r : results) {
    nlohmann::json runs = nlohmann::json::array();
    for (const RunReport& run : r.runs) {
      runs.push_back({{"dataset", run.dataset},
                      {"method", method_name(run.method)},
                      {"split_seed", run.split_seed},
                      {"accuracy", run.accuracy},
                      {"solver_seconds", run.solver_seconds},
                      {"total_seconds", run.total_seconds},
                      {"n_labeled", run.n_labeled},
                      {"n_unlabeled", run.n_unlabeled},
                      {"k", run.k},
                      {"config", run.config}});
    }
    doc.push_back({{"mean_accuracy", r.mean_accuracy},
                   {"mean_solver_seconds", r.mean_solver_seconds},
                   {"mean_total_seconds", r.mean_total_seconds},
                   {"runs", std::move(runs)}});
  }
  return doc.dump(2) + "\n";
}

std::string soft_labels_csv(const SoftLabels& P, std::span<const std::size_t> unlabeled_idx) {
  if (static_cast<std::size_t>(P.p.size()) != unlabeled_idx.size()) {
    throw DimensionMismatch("soft_labels_csv: " + std::to_string(unlabeled_idx.size()) + " indices for " +
                            std::to_string(P.p.size()) + " entries");
  }
  std::string out = "index,p\n";
  for (std::size_t j = 0; j < unlabeled_idx.size(); ++j) {
    out += std::to_string(unlabeled_idx[j]) + ',' + shortest(P.p[static_cast<Eigen::Index>(j)]) + '\n';
  }
  return out;
}

}  // namespace s3vm
