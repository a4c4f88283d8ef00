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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "s3vm/dataset.hpp"
#include "s3vm/error.hpp"
#include "s3vm/harness.hpp"
#include "s3vm/kernels.hpp"
#include "s3vm/submodular.hpp"
#include "s3vm/verify.hpp"

namespace fs = std::filesystem;
using namespace s3vm;

namespace {

struct RunOptions {
  std::string data;
  std::string registry = "data/registry.txt";
  std::string method = "s-qp-s3vm";
  std::optional<double> C;
  std::optional<double> Cstar;
  std::optional<double> r;
  std::optional<std::size_t> labeled;
  std::uint64_t seed = 0;
  std::size_t splits = 10;
  std::string kernel = "linear";
  double gamma = 1.0;
  std::optional<double> d;
  std::size_t k_cap = 3000;
  bool plain = false;
  bool parallel_splits = false;
  std::string csv;
  std::string json;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::optional<RegistryEntry> lookup(const RunOptions& o) {
  if (fs::exists(o.data) || !fs::exists(o.registry)) return std::nullopt;
  const std::vector<RegistryEntry> registry = read_registry(o.registry);
  return find_entry(registry, o.data);
}

// Registry settings first, then explicit flags.
std::pair<ExperimentConfig, fs::path> resolve(const RunOptions& o) {
  ExperimentConfig cfg;
  fs::path path = o.data;
  const Method method = parse_method(o.method);
  if (const auto entry = lookup(o)) {
    cfg = config_from_entry(*entry, method);
    path = entry->path;
  } else {
    cfg.method = method;
    cfg.dataset = fs::path(o.data).filename().string();
  }
  if (o.C) cfg.C = *o.C;
  if (o.Cstar) cfg.cstar_over_c = *o.Cstar / cfg.C;
  if (o.r) cfg.r = *o.r;
  if (o.labeled) cfg.n_labeled = *o.labeled;
  cfg.seed = o.seed;
  cfg.splits = o.splits;
  cfg.kernel.kind = o.kernel == "rbf" ? KernelKind::rbf : KernelKind::linear;
  cfg.kernel.gamma = o.gamma;
  cfg.kernel.d_override = o.d;
  cfg.k_cap = o.k_cap;
  cfg.lazy = !o.plain;
  cfg.parallel_splits = o.parallel_splits;
  return {cfg, path};
}

void add_run_flags(CLI::App* cmd, RunOptions& o, bool need_data) {
  auto* data = cmd->add_option("--data", o.data, "libsvm file (.gz allowed) or registry name");
  if (need_data) data->required();
  cmd->add_option("--registry", o.registry, "registry file")->capture_default_str();
  cmd->add_option("--method", o.method, "svm | qp-s3vm | s-qp-s3vm")->capture_default_str();
  cmd->add_option("--C", o.C, "labeled loss weight");
  cmd->add_option("--Cstar", o.Cstar, "unlabeled loss weight C*");
  cmd->add_option("--r", o.r, "fraction of U labeled +1 (default: true ratio of U)");
  cmd->add_option("--labeled", o.labeled, "labeled samples per split");
  cmd->add_option("--seed", o.seed, "seed of the first split")->capture_default_str();
  cmd->add_option("--splits", o.splits, "number of random splits")->capture_default_str();
  cmd->add_option("--kernel", o.kernel, "linear | rbf")
      ->check(CLI::IsMember({"linear", "rbf"}))
      ->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "rbf width")->capture_default_str();
  cmd->add_option("--d", o.d, "kernel bound override (linear)");
  cmd->add_option("--k-cap", o.k_cap, "largest |U| for qp-s3vm")->capture_default_str();
  cmd->add_flag("--plain-greedy", o.plain, "plain instead of lazy greedy");
  cmd->add_flag("--parallel-splits", o.parallel_splits, "run splits concurrently");
  cmd->add_option("--csv", o.csv, "write per-split results as CSV");
  cmd->add_option("--json", o.json, "write per-split results as JSON");
}

int cmd_solve(const RunOptions& o) {
  const auto [cfg, path] = resolve(o);
  const Dataset full = read_libsvm_file(path, ParseOptions{true});
  const std::vector<ExperimentResult> results{run_experiment(full, cfg)};
  std::cout << format_table(results);
  if (!o.csv.empty()) write_file(o.csv, reports_csv(results));
  if (!o.json.empty()) write_file(o.json, reports_json(results));
  return 0;
}

int cmd_bench(const RunOptions& o, const std::vector<std::string>& methods, std::vector<std::string> names) {
  const std::vector<RegistryEntry> registry = read_registry(o.registry);
  if (names.empty()) {
    for (const RegistryEntry& e : registry) names.push_back(e.name);
  }
  std::vector<ExperimentResult> results;
  for (const std::string& name : names) {
    const RegistryEntry& entry = find_entry(registry, name);
    if (!fs::exists(entry.path)) {
      std::cerr << name << ": " << entry.path.string() << " not found, skipped\n";
      continue;
    }
    const Dataset full = read_libsvm_file(entry.path, ParseOptions{true});
    for (const std::string& m : methods) {
      RunOptions per = o;
      per.data = name;
      per.method = m;
      auto [cfg, path] = resolve(per);
      try {
        results.push_back(run_experiment(full, cfg));
      } catch (const InvalidArgument& e) {
        std::cerr << name << " " << m << ": " << e.what() << "\n";
      }
    }
  }
  std::cout << format_table(results);
  if (!o.csv.empty()) write_file(o.csv, reports_csv(results));
  if (!o.json.empty()) write_file(o.json, reports_json(results));
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& json) {
  const std::vector<VerifyReport> reports = run_verify(suite, seed);
  nlohmann::json doc = nlohmann::json::array();
  bool ok = true;
  for (const VerifyReport& r : reports) {
    for (const CheckResult& c : r.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << r.suite << "/" << c.name << " samples=" << c.samples
                << " max_violation=" << c.max_violation << "\n";
    }
    ok = ok && r.passed();
    doc.push_back(r.to_json());
  }
  const std::string text = doc.dump(2) + "\n";
  if (json.empty()) {
    std::cout << text;
  } else {
    write_file(json, text);
  }
  return ok ? 0 : 1;
}

int cmd_inspect(const RunOptions& o, std::size_t split_index) {
  auto [cfg, path] = resolve(o);
  const Dataset full = read_libsvm_file(path, ParseOptions{true});
  const Dataset normalized = normalize_features(full);
  const SplitRun run = run_split(normalized, cfg, split_index);
  std::cout << run.report.config << "\naccuracy=" << run.report.accuracy
            << " solver_seconds=" << run.report.solver_seconds << "\n";
  if (run.soft) {
    if (!o.csv.empty()) write_file(o.csv, soft_labels_csv(*run.soft, run.split.unlabeled_idx));
  }
  if (run.greedy) {
    if (!o.csv.empty()) write_file(o.csv, solution_csv(*run.greedy, run.split.unlabeled_idx));
    if (!o.json.empty()) write_file(o.json, trace_json(*run.greedy, run.split.unlabeled_idx));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised SVM via a quadratic relaxation and submodular greedy selection"};
  app.require_subcommand(1);

  RunOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "run one method on one dataset over random splits");
  add_run_flags(solve, solve_opts, true);

  RunOptions bench_opts;
  std::vector<std::string> bench_methods{"svm", "s-qp-s3vm", "qp-s3vm"};
  std::vector<std::string> bench_names;
  auto* bench = app.add_subcommand("bench", "sweep registry datasets and methods");
  add_run_flags(bench, bench_opts, false);
  bench->add_option("--methods", bench_methods, "methods to run")->delimiter(',')->capture_default_str();
  bench->add_option("--datasets", bench_names, "registry names (default: all)")->delimiter(',');

  std::string suite = "all";
  std::uint64_t verify_seed = 0;
  std::string verify_json;
  auto* verify = app.add_subcommand("verify", "run property suites");
  verify->add_option("suite", suite, "all | theorem1 | theorem3 | greedy | equivalence | vertex | incremental | lazy")
      ->capture_default_str();
  verify->add_option("--seed", verify_seed, "fixture seed")->capture_default_str();
  verify->add_option("--json", verify_json, "write the report here instead of stdout");

  RunOptions inspect_opts;
  std::size_t split_index = 0;
  auto* inspect = app.add_subcommand("inspect", "one split: soft labels (qp-s3vm) or selection trace (s-qp-s3vm)");
  add_run_flags(inspect, inspect_opts, true);
  inspect->add_option("--split", split_index, "split index")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(solve_opts);
    if (*bench) return cmd_bench(bench_opts, bench_methods, bench_names);
    if (*verify) return cmd_verify(suite, verify_seed, verify_json);
    if (*inspect) return cmd_inspect(inspect_opts, split_index);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
