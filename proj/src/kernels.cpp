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

#include "s3vm/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "s3vm/error.hpp"
#include "s3vm/parallel.hpp"

namespace s3vm {
namespace {

static_assert(std::endian::native == std::endian::little, "kernel cache I/O assumes a little-endian host");

constexpr char kCacheMagic[8] = {'S', '3', 'V', 'M', 'K', 'B', 'L', '1'};

double range_tolerance(double d) { return 1e-12 * std::max(1.0, d); }

double dense_dot(const SparseVector& x, const std::vector<double>& dense) {
  double s = 0.0;
  for (const Feature& f : x) s += f.value * dense[f.index];
  return s;
}

Eigen::MatrixXd cross_block(const KernelSpec& spec, const std::vector<const SparseVector*>& rows,
                            const std::vector<const SparseVector*>& cols, bool symmetric) {
  Eigen::MatrixXd K(rows.size(), cols.size());
  parallel_chunks(rows.size(), 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = symmetric ? a : 0; b < cols.size(); ++b) {
        const double v = kernel_eval(spec, *rows[a], *cols[b]);
        K(a, b) = v;
        if (symmetric) K(b, a) = v;
      }
    }
  });
  return K;
}

void write_doubles(std::ofstream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void write_row_major(std::ofstream& out, const Eigen::MatrixXd& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  write_doubles(out, rm.data(), static_cast<std::size_t>(rm.size()));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("kernel cache truncated");
  return v;
}

Eigen::MatrixXd read_row_major(std::ifstream& in, std::size_t rows, std::size_t cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rows * cols * sizeof(double)));
  if (!in) throw Error("kernel cache truncated");
  return rm;
}

}  // namespace

std::string KernelSpec::describe() const {
  std::ostringstream ss;
  if (kind == KernelKind::linear) {
    ss << "linear";
  } else {
    ss << "rbf(gamma=" << gamma << ")";
  }
  if (d_override) ss << " d=" << *d_override;
  return ss.str();
}

std::uint64_t KernelSpec::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(kind == KernelKind::linear ? 1 : 2);
  mix(kind == KernelKind::rbf ? std::bit_cast<std::uint64_t>(gamma) : 0);
  mix(d_override ? std::bit_cast<std::uint64_t>(*d_override) : 0);
  return h;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->index == j->index) {
      s += i->value * j->value;
      ++i;
      ++j;
    } else if (i->index < j->index) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    double diff = 0.0;
    if (j == b.end() || (i != a.end() && i->index < j->index)) {
      diff = i->value;
      ++i;
    } else if (i == a.end() || j->index < i->index) {
      diff = j->value;
      ++j;
    } else {
      diff = i->value - j->value;
      ++i;
      ++j;
    }
    s += diff * diff;
  }
  return s;
}

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) {
  if (spec.kind == KernelKind::linear) return dot(a, b);
  return std::exp(-spec.gamma * squared_distance(a, b));
}

double kernel_bound(const Dataset& data, const KernelSpec& spec) {
  if (spec.kind == KernelKind::rbf && !(spec.gamma > 0.0)) {
    throw InvalidArgument("rbf kernel needs gamma > 0");
  }
  if (spec.d_override) {
    if (spec.kind == KernelKind::rbf) throw InvalidArgument("the rbf kernel bound is fixed at d = 1");
    if (!(*spec.d_override > 0.0)) throw InvalidArgument("d_override must be positive");
    return *spec.d_override;
  }
  if (spec.kind == KernelKind::rbf) return 1.0;
  if (data.empty() || data.n_features == 0) return 1.0;
  std::size_t nnz = 0;
  for (const SparseVector& x : data.samples) nnz += x.size();
  const double cells = static_cast<double>(data.size()) * static_cast<double>(data.n_features);
  if (2.0 * static_cast<double>(nnz) >= cells) return static_cast<double>(data.n_features);
  return std::ceil(static_cast<double>(nnz) / static_cast<double>(data.size()));
}

KernelBlocks make_blocks(Eigen::MatrixXd K_ll, Eigen::MatrixXd K_uu, Eigen::MatrixXd K_lu,
                         Eigen::VectorXd y, double d) {
  if (K_ll.rows() != K_ll.cols() || K_uu.rows() != K_uu.cols()) {
    throw DimensionMismatch("K_ll and K_uu must be square");
  }
  if (K_lu.rows() != K_ll.rows() || K_lu.cols() != K_uu.rows()) {
    throw DimensionMismatch("K_lu must be |L| x |U|");
  }
  if (y.size() != K_ll.rows()) throw DimensionMismatch("label vector must have |L| entries");
  if (!(d > 0.0)) throw InvalidArgument("kernel bound d must be positive");
  KernelBlocks b;
  b.K_ll = std::move(K_ll);
  b.K_uu = std::move(K_uu);
  b.K_lu = std::move(K_lu);
  b.y = std::move(y);
  b.d = d;
  b.rowsum_uu = b.K_uu.rowwise().sum();
  b.ylabelsum_lu = b.K_lu.transpose() * b.y;
  return b;
}

void validate_blocks(const KernelBlocks& b) {
  const double tol = range_tolerance(b.d);
  auto check_range = [&](const Eigen::MatrixXd& m, const char* name) {
    if (m.size() == 0) return;
    if (m.minCoeff() < -tol || m.maxCoeff() > b.d + tol) {
      std::ostringstream ss;
      ss << name << " has entries outside [0, d=" << b.d << "] (min " << m.minCoeff() << ", max "
         << m.maxCoeff() << "); pass a larger d_override";
      throw InvalidArgument(ss.str());
    }
  };
  auto check_symmetric = [](const Eigen::MatrixXd& m, const char* name) {
    if (m.size() != 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidArgument(std::string(name) + " is not symmetric");
    }
  };
  check_symmetric(b.K_ll, "K_ll");
  check_symmetric(b.K_uu, "K_uu");
  check_range(b.K_ll, "K_ll");
  check_range(b.K_uu, "K_uu");
  check_range(b.K_lu, "K_lu");
}

KernelBlocks build_blocks(const Dataset& data, const KernelSpec& spec) {
  const double d = kernel_bound(data, spec);
  std::vector<const SparseVector*> L;
  std::vector<const SparseVector*> U;
  for (std::size_t i : data.labeled_idx) L.push_back(&data.samples[i]);
  for (std::size_t j : data.unlabeled_idx) U.push_back(&data.samples[j]);
  const std::vector<double> y = labeled_targets(data);

  KernelBlocks b = make_blocks(cross_block(spec, L, L, true), cross_block(spec, U, U, true),
                               cross_block(spec, L, U, false),
                               Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())), d);
  validate_blocks(b);
  return b;
}

void save_blocks(const std::filesystem::path& path, const KernelBlocks& b, const KernelSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  const std::uint64_t header[3] = {b.n_labeled(), b.n_unlabeled(), spec.hash()};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  write_doubles(out, &b.d, 1);
  write_doubles(out, b.y.data(), static_cast<std::size_t>(b.y.size()));
  write_row_major(out, b.K_ll);
  write_row_major(out, b.K_uu);
  write_row_major(out, b.K_lu);
  if (!out) throw Error("failed writing " + path.string());
}

KernelBlocks load_blocks(const std::filesystem::path& path, const KernelSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw Error(path.string() + " is not a kernel cache");
  }
  const auto nl = read_pod<std::uint64_t>(in);
  const auto nu = read_pod<std::uint64_t>(in);
  const auto h = read_pod<std::uint64_t>(in);
  if (h != spec.hash()) throw Error("kernel cache was built with a different kernel spec");
  const double d = read_pod<double>(in);
  Eigen::VectorXd y(static_cast<Eigen::Index>(nl));
  in.read(reinterpret_cast<char*>(y.data()), static_cast<std::streamsize>(nl * sizeof(double)));
  if (!in) throw Error("kernel cache truncated");
  Eigen::MatrixXd K_ll = read_row_major(in, nl, nl);
  Eigen::MatrixXd K_uu = read_row_major(in, nu, nu);
  Eigen::MatrixXd K_lu = read_row_major(in, nl, nu);
  return make_blocks(std::move(K_ll), std::move(K_uu), std::move(K_lu), std::move(y), d);
}

void DenseUnlabeledKernel::row(std::size_t m, std::span<double> out) const {
  const auto& K = blocks_->K_uu;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = K(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j));
}

OnDemandKernel::OnDemandKernel(const Dataset& data, const KernelSpec& spec)
    : spec_(spec), n_labeled_(data.labeled_idx.size()), d_(kernel_bound(data, spec)) {
  const std::vector<double> y = labeled_targets(data);
  for (std::size_t j : data.unlabeled_idx) unlabeled_.push_back(&data.samples[j]);
  const std::size_t nu = unlabeled_.size();
  diagonal_.resize(nu);
  row_sum_.assign(nu, 0.0);
  label_sum_.assign(nu, 0.0);

  if (spec.kind == KernelKind::linear) {
    // 0 <= K everywhere needs nonnegative features; K[a,b] <= sqrt(K[a,a] K[b,b])
    // bounds every entry by the largest diagonal.
    double max_diag = 0.0;
    for (const SparseVector& x : data.samples) {
      for (const Feature& f : x) {
        if (f.value < 0.0) throw InvalidArgument("linear kernel bound needs nonnegative (normalized) features");
      }
    }
    for (std::size_t i : data.labeled_idx) max_diag = std::max(max_diag, dot(data.samples[i], data.samples[i]));
    std::vector<double> sum_u(data.n_features + 1, 0.0);
    std::vector<double> sum_yl(data.n_features + 1, 0.0);
    for (const SparseVector* x : unlabeled_) {
      for (const Feature& f : *x) sum_u[f.index] += f.value;
    }
    for (std::size_t a = 0; a < data.labeled_idx.size(); ++a) {
      for (const Feature& f : data.samples[data.labeled_idx[a]]) sum_yl[f.index] += y[a] * f.value;
    }
    for (std::size_t m = 0; m < nu; ++m) {
      diagonal_[m] = dot(*unlabeled_[m], *unlabeled_[m]);
      max_diag = std::max(max_diag, diagonal_[m]);
      row_sum_[m] = dense_dot(*unlabeled_[m], sum_u);
      label_sum_[m] = dense_dot(*unlabeled_[m], sum_yl);
    }
    if (max_diag > d_ + range_tolerance(d_)) {
      std::ostringstream ss;
      ss << "linear kernel entries reach " << max_diag << " > d=" << d_ << "; pass a larger d_override";
      throw InvalidArgument(ss.str());
    }
    return;
  }

  std::vector<double> rowbuf(nu);
  for (std::size_t m = 0; m < nu; ++m) {
    diagonal_[m] = kernel_eval(spec_, *unlabeled_[m], *unlabeled_[m]);
    row(m, rowbuf);
    for (double v : rowbuf) row_sum_[m] += v;
    for (std::size_t a = 0; a < data.labeled_idx.size(); ++a) {
      label_sum_[m] += y[a] * kernel_eval(spec_, data.samples[data.labeled_idx[a]], *unlabeled_[m]);
    }
  }
}

void OnDemandKernel::row(std::size_t m, std::span<double> out) const {
  const SparseVector& xm = *unlabeled_[m];
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = kernel_eval(spec_, xm, *unlabeled_[j]);
}

}  // namespace s3vm
