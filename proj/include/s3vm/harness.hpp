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

// Experiment driver: repeated random L/U splits of one dataset, one method
// per run, transductive accuracy on U against the held-out labels.

#ifndef S3VM_HARNESS_HPP_
#define S3VM_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s3vm/dataset.hpp"
#include "s3vm/kernels.hpp"
#include "s3vm/qp_relax.hpp"
#include "s3vm/submodular.hpp"

namespace s3vm {

enum class Method { svm, qp_s3vm, s_qp_s3vm };

std::string_view method_name(Method method);
// Accepts "svm", "qp-s3vm" and "s-qp-s3vm".
Method parse_method(std::string_view name);

struct ExperimentConfig {
  std::string dataset = "data";
  Method method = Method::s_qp_s3vm;
  double C = 1.0;
  double cstar_over_c = 1.0;
  std::optional<double> r;  // defaults to the true positive ratio of U
  std::size_t n_labeled = 2;
  std::size_t splits = 10;
  std::uint64_t seed = 0;  // split i uses seed + i
  KernelSpec kernel;
  std::size_t k_cap = 3000;  // largest |U| accepted by qp-s3vm
  std::size_t svm_epochs = 2000;
  std::size_t qp_restarts = 20;
  bool lazy = true;  // lazy greedy for s-qp-s3vm
  bool parallel_splits = false;

  double C_star() const { return C * cstar_over_c; }
};

// Settings of a registry entry; r stays unset when the entry has none.
ExperimentConfig config_from_entry(const RegistryEntry& entry, Method method);

struct RunReport {
  std::string dataset;
  Method method = Method::svm;
  std::uint64_t split_seed = 0;
  double accuracy = 0.0;        // percent of U labeled correctly
  double solver_seconds = 0.0;  // training / selection only
  double total_seconds = 0.0;   // split, kernel setup and solver
  std::size_t n_labeled = 0;
  std::size_t n_unlabeled = 0;
  std::size_t k = 0;            // samples of U assigned +1 (0 for svm)
  std::string config;           // one-line echo of every setting of the run
};

struct SplitRun {
  RunReport report;
  Dataset split;
  std::vector<Label> truth;            // held-out labels of U
  std::vector<Label> labels;           // predicted labels of U
  std::optional<SoftLabels> soft;      // qp-s3vm
  std::optional<GreedyResult> greedy;  // s-qp-s3vm
};

struct ExperimentResult {
  std::vector<RunReport> runs;
  double mean_accuracy = 0.0;
  double mean_solver_seconds = 0.0;
  double mean_total_seconds = 0.0;
};

// One split of an already normalized dataset. Throws InvalidArgument when
// qp-s3vm is asked for more than k_cap unlabeled samples.
SplitRun run_split(const Dataset& normalized, const ExperimentConfig& cfg, std::size_t split_index);

// Normalizes features to [0,1] once, then runs cfg.splits splits.
ExperimentResult run_experiment(const Dataset& full, const ExperimentConfig& cfg);

std::string format_table(std::span<const ExperimentResult> results);
// Header: dataset,method,split_seed,accuracy,solver_seconds,total_seconds,n_labeled,n_unlabeled,k
std::string reports_csv(std::span<const ExperimentResult> results);
std::string reports_json(std::span<const ExperimentResult> results);

// `index,p` per unlabeled sample, index being the sample index in the source data.
std::string soft_labels_csv(const SoftLabels& P, std::span<const std::size_t> unlabeled_idx);

}  // namespace s3vm

#endif  // S3VM_HARNESS_HPP_
