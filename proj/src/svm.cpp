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

#include "s3vm/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "s3vm/error.hpp"

namespace s3vm {
namespace {

double hinge(const LinearModel& model, const SparseVector& x, double y) {
  return std::max(0.0, 1.0 - y * model.decision_value(x));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

double LinearModel::decision_value(const SparseVector& x) const {
  double s = b;
  for (const Feature& f : x) {
    if (f.index <= w.size()) s += w[f.index - 1] * f.value;
  }
  return s;
}

SvmFit train_supervised(const Dataset& data, double C, const SvmOptions& options) {
  if (!(C > 0.0)) throw InvalidArgument("train_supervised: C must be positive");
  if (options.epochs == 0) throw InvalidArgument("train_supervised: epochs must be positive");
  const std::vector<double> y = labeled_targets(data);
  const std::size_t n = y.size();
  const bool has_pos = std::find(y.begin(), y.end(), 1.0) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), -1.0) != y.end();
  if (!has_pos || !has_neg) throw InvalidArgument("train_supervised: labeled set needs both classes");

  const std::size_t dims = data.n_features;
  const double lambda = 1.0 / (C * static_cast<double>(n));

  std::vector<double> w(dims, 0.0);
  double b = 0.0;
  std::vector<double> w_sum(dims);
  double b_sum = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(options.seed);

  SvmFit best;
  best.objective = std::numeric_limits<double>::infinity();
  best.epoch_best.reserve(options.epochs);
  LinearModel averaged;
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    std::fill(w_sum.begin(), w_sum.end(), 0.0);
    b_sum = 0.0;
    for (std::size_t a : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const SparseVector& x = data.samples[data.labeled_idx[a]];
      double margin = b;
      for (const Feature& f : x) margin += w[f.index - 1] * f.value;
      margin *= y[a];
      const double shrink = 1.0 - eta * lambda;
      for (double& v : w) v *= shrink;
      if (margin < 1.0) {
        for (const Feature& f : x) w[f.index - 1] += eta * y[a] * f.value;
        b += eta * y[a];
      }
      for (std::size_t k = 0; k < dims; ++k) w_sum[k] += w[k];
      b_sum += b;
    }
    averaged.w.resize(dims);
    for (std::size_t k = 0; k < dims; ++k) averaged.w[k] = w_sum[k] / static_cast<double>(n);
    averaged.b = b_sum / static_cast<double>(n);
    const double obj = objective_value(averaged, data, C);
    if (obj < best.objective) {
      best.objective = obj;
      best.model = averaged;
    }
    best.epoch_best.push_back(best.objective);
  }

  best.slacks.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    best.slacks.push_back(hinge(best.model, data.samples[data.labeled_idx[a]], y[a]));
  }
  return best;
}

Label predict(const LinearModel& model, const SparseVector& x) {
  return model.decision_value(x) >= 0.0 ? Label::positive : Label::negative;
}

double objective_value(const LinearModel& model, const Dataset& data, double C) {
  double reg = 0.0;
  for (double v : model.w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i : data.labeled_idx) loss += hinge(model, data.samples[i], to_double(data.labels[i]));
  return 0.5 * reg + C * loss;
}

std::string write_model(const LinearModel& model) {
  std::string out;
  for (std::size_t k = 0; k < model.w.size(); ++k) {
    if (model.w[k] == 0.0) continue;
    out += std::to_string(k + 1) + ":" + format_double(model.w[k]) + "\n";
  }
  out += "b:" + format_double(model.b) + "\n";
  return out;
}

LinearModel parse_model(std::string_view text) {
  LinearModel model;
  bool has_bias = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected key:value");
    const std::string_view key = line.substr(0, colon);
    const std::string_view val = line.substr(colon + 1);
    double v = 0.0;
    if (auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        ec != std::errc() || p != val.data() + val.size()) {
      throw ParseError(line_no, "bad number '" + std::string(val) + "'");
    }
    if (key == "b") {
      model.b = v;
      has_bias = true;
      continue;
    }
    std::size_t index = 0;
    if (auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
        ec != std::errc() || p != key.data() + key.size() || index == 0) {
      throw ParseError(line_no, "bad weight index '" + std::string(key) + "'");
    }
    if (model.w.size() < index) model.w.resize(index, 0.0);
    model.w[index - 1] = v;
  }
  if (!has_bias) throw ParseError(0, "model has no b: line");
  return model;
}

}  // namespace s3vm
