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

// Kernel evaluation and the labeled/unlabeled kernel blocks consumed by the
// semi-supervised solvers.

#ifndef S3VM_KERNELS_HPP_
#define S3VM_KERNELS_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "s3vm/dataset.hpp"

namespace s3vm {

enum class KernelKind { linear, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double gamma = 1.0;                 // rbf only, must be > 0
  std::optional<double> d_override;   // replaces the computed kernel bound d

  std::string describe() const;
  std::uint64_t hash() const;
};

double dot(const SparseVector& a, const SparseVector& b);
double squared_distance(const SparseVector& a, const SparseVector& b);

// linear: <a,b>; rbf: exp(-gamma ||a-b||^2).
double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b);

// The bound d with 0 <= K <= d: 1 for rbf; for the linear kernel on [0,1]
// data, n_features when the data is dense (>= half of all entries stored)
// and ceil(mean nonzeros per sample) otherwise. d_override wins if set.
double kernel_bound(const Dataset& data, const KernelSpec& spec);

// Dense kernel blocks over a split. K_lu is |L| x |U|; y holds the labels of
// L in labeled_idx order.
//   rowsum_uu[j]    = sum_{j' in U} K_uu[j, j']
//   ylabelsum_lu[j] = sum_{i in L} y_i K_lu[i, j]
struct KernelBlocks {
  Eigen::MatrixXd K_ll;
  Eigen::MatrixXd K_uu;
  Eigen::MatrixXd K_lu;
  Eigen::VectorXd y;
  double d = 1.0;
  Eigen::VectorXd rowsum_uu;
  Eigen::VectorXd ylabelsum_lu;

  std::size_t n_labeled() const { return static_cast<std::size_t>(K_ll.rows()); }
  std::size_t n_unlabeled() const { return static_cast<std::size_t>(K_uu.rows()); }
};

// Assembles blocks from raw matrices and fills the cached sums. Checks shapes
// only; call validate_blocks() for the value-range premise.
KernelBlocks make_blocks(Eigen::MatrixXd K_ll, Eigen::MatrixXd K_uu, Eigen::MatrixXd K_lu,
                         Eigen::VectorXd y, double d);

// Throws InvalidArgument unless K_ll and K_uu are symmetric (1e-12 absolute)
// and every entry lies in [0, d].
void validate_blocks(const KernelBlocks& blocks);

// Computes all three blocks (rows in parallel) and validates them. A linear
// kernel whose entries exceed the computed d asks for d_override.
KernelBlocks build_blocks(const Dataset& data, const KernelSpec& spec);

// Little-endian binary cache: "S3VMKBL1", u64 |L|, u64 |U|, u64 spec hash,
// f64 d, then y, K_ll, K_uu, K_lu as row-major f64.
void save_blocks(const std::filesystem::path& path, const KernelBlocks& blocks, const KernelSpec& spec);
KernelBlocks load_blocks(const std::filesystem::path& path, const KernelSpec& spec);

// Read access to the unlabeled side of the kernel as needed by the greedy
// selector: per-candidate constants plus one K_uu row per accepted element.
class UnlabeledKernel {
 public:
  virtual ~UnlabeledKernel() = default;

  virtual std::size_t n_labeled() const = 0;
  virtual std::size_t n_unlabeled() const = 0;
  virtual double bound() const = 0;
  virtual double diagonal(std::size_t m) const = 0;
  virtual double row_sum(std::size_t m) const = 0;
  virtual double label_sum(std::size_t m) const = 0;
  // out[j] = K_uu[m, j]
  virtual void row(std::size_t m, std::span<double> out) const = 0;
};

class DenseUnlabeledKernel final : public UnlabeledKernel {
 public:
  explicit DenseUnlabeledKernel(const KernelBlocks& blocks) : blocks_(&blocks) {}

  std::size_t n_labeled() const override { return blocks_->n_labeled(); }
  std::size_t n_unlabeled() const override { return blocks_->n_unlabeled(); }
  double bound() const override { return blocks_->d; }
  double diagonal(std::size_t m) const override { return blocks_->K_uu(m, m); }
  double row_sum(std::size_t m) const override { return blocks_->rowsum_uu[m]; }
  double label_sum(std::size_t m) const override { return blocks_->ylabelsum_lu[m]; }
  void row(std::size_t m, std::span<double> out) const override;

 private:
  const KernelBlocks* blocks_;
};

// Computes K_uu rows lazily from the samples. For the linear kernel the
// per-candidate sums reduce to dot products with aggregate vectors, so setup
// is linear in the number of stored features.
class OnDemandKernel final : public UnlabeledKernel {
 public:
  OnDemandKernel(const Dataset& data, const KernelSpec& spec);

  std::size_t n_labeled() const override { return n_labeled_; }
  std::size_t n_unlabeled() const override { return unlabeled_.size(); }
  double bound() const override { return d_; }
  double diagonal(std::size_t m) const override { return diagonal_[m]; }
  double row_sum(std::size_t m) const override { return row_sum_[m]; }
  double label_sum(std::size_t m) const override { return label_sum_[m]; }
  void row(std::size_t m, std::span<double> out) const override;

 private:
  KernelSpec spec_;
  std::vector<const SparseVector*> unlabeled_;
  std::size_t n_labeled_ = 0;
  double d_ = 1.0;
  std::vector<double> diagonal_;
  std::vector<double> row_sum_;
  std::vector<double> label_sum_;
};

}  // namespace s3vm

#endif  // S3VM_KERNELS_HPP_
