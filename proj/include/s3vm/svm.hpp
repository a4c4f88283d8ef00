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

// Linear soft-margin SVM trained on the labeled part of a split only.

#ifndef S3VM_SVM_HPP_
#define S3VM_SVM_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "s3vm/dataset.hpp"

namespace s3vm {

struct LinearModel {
  std::vector<double> w;  // w[f - 1] is the weight of feature index f
  double b = 0.0;

  double decision_value(const SparseVector& x) const;
};

struct SvmFit {
  LinearModel model;
  double objective = 0.0;      // (1/2)||w||^2 + C sum slacks
  std::vector<double> slacks;  // hinge loss per labeled sample, labeled_idx order
  std::vector<double> epoch_best;  // best objective seen after each epoch
};

struct SvmOptions {
  std::size_t epochs = 2000;
  std::uint64_t seed = 0;
};

// Primal stochastic subgradient descent on the hinge objective, step
// 1/(lambda t) with lambda = 1/(C |L|), bias as an unregularized coordinate.
// Each epoch visits L in a seeded order; the epoch-averaged iterate with the
// lowest objective is returned. Requires both classes in L and C > 0.
SvmFit train_supervised(const Dataset& data, double C, const SvmOptions& options = {});

// Sign of the decision value; exactly 0 maps to +1.
Label predict(const LinearModel& model, const SparseVector& x);

// (1/2)||w||^2 + C * sum over L of max(0, 1 - y_i (<w, x_i> + b)).
double objective_value(const LinearModel& model, const Dataset& data, double C);

// One `index:value` line per nonzero weight (1-based index), then `b:<value>`.
std::string write_model(const LinearModel& model);
LinearModel parse_model(std::string_view text);

}  // namespace s3vm

#endif  // S3VM_SVM_HPP_
