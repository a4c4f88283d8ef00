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

// Sparse binary-labeled data sets: libsvm text I/O, feature-wise min-max
// normalization and seeded labeled/unlabeled splits.

#ifndef S3VM_DATASET_HPP_
#define S3VM_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace s3vm {

struct Feature {
  std::uint32_t index;  // 1-based, as in the libsvm format
  double value;

  friend bool operator==(const Feature&, const Feature&) = default;
};

// Entries sorted by strictly increasing index; absent indices are zero.
using SparseVector = std::vector<Feature>;

enum class Label : std::int8_t { negative = -1, unknown = 0, positive = 1 };

inline double to_double(Label y) { return static_cast<double>(static_cast<std::int8_t>(y)); }

// A set of samples with a labeled/unlabeled partition.
//
// Invariants: labeled_idx and unlabeled_idx are sorted, disjoint and together
// cover [0, size()); every labeled sample carries a +1/-1 label. A freshly
// parsed data set is fully labeled (all samples in labeled_idx). After
// make_split the labels of unlabeled samples are Label::unknown; the ground
// truth stays in the source data set and is recovered with unlabeled_truth().
struct Dataset {
  std::vector<SparseVector> samples;
  std::vector<Label> labels;
  std::vector<std::size_t> labeled_idx;
  std::vector<std::size_t> unlabeled_idx;
  std::size_t n_features = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ParseOptions {
  // Files with more than two distinct label values are rejected unless set;
  // when set, every positive label maps to +1 and the rest to -1.
  bool map_multiclass = false;
};

// Parses `<label> <idx>:<val> ...` lines. Labels > 0 become +1, others -1.
// Throws ParseError (with the 1-based line number) on malformed lines,
// non-increasing or zero indices, or when the input holds no samples.
Dataset parse_libsvm(std::string_view text, const ParseOptions& options = {});

// Reads a file; names ending in ".gz" are inflated with zlib first.
Dataset read_libsvm_file(const std::filesystem::path& path, const ParseOptions& options = {});

// Writes one line per sample with shortest round-trip number formatting.
// Unknown labels are written as 0.
std::string write_libsvm(const Dataset& data);

// Per-column (v - min) / (max - min). Implicit zeros take part in min/max, so
// columns with min 0 keep their sparsity; columns with a negative minimum are
// densified. Constant columns become 0. Zero results are not stored.
Dataset normalize_features(const Dataset& data);

struct SplitSpec {
  std::size_t n_labeled = 2;
  std::uint64_t seed = 0;
  bool stratified = true;  // at least one sample of each class in L
};

// Picks n_labeled samples for L (deterministic in seed), moves the rest to U
// and masks their labels. Requires a fully labeled input.
Dataset make_split(const Dataset& full, const SplitSpec& spec);

// Ground-truth labels of split.unlabeled_idx, read from the fully labeled
// source the split was made from.
std::vector<Label> unlabeled_truth(const Dataset& full, const Dataset& split);

// Fraction of +1 entries.
double positive_ratio(std::span<const Label> labels);

// Labels of the labeled samples as a +1/-1 vector, in labeled_idx order.
std::vector<double> labeled_targets(const Dataset& data);

// One entry of the flat key=value dataset registry:
//
//   name=australian
//   path=australian
//   C=0.922
//   Cstar_over_C=0.1
//   r=0.44
//   labeled=3
//
// A `name=` line starts a new entry; `#` starts a comment. Relative paths
// resolve against the registry file's directory.
struct RegistryEntry {
  std::string name;
  std::filesystem::path path;
  double C = 1.0;
  double cstar_over_c = 1.0;
  std::optional<double> r;
  std::size_t n_labeled = 2;
  std::optional<std::size_t> n_features;
  std::optional<std::size_t> n_samples;
};

std::vector<RegistryEntry> parse_registry(std::string_view text,
                                          const std::filesystem::path& base_dir = {});
std::vector<RegistryEntry> read_registry(const std::filesystem::path& path);
const RegistryEntry& find_entry(std::span<const RegistryEntry> registry, std::string_view name);

}  // namespace s3vm

#endif  // S3VM_DATASET_HPP_
