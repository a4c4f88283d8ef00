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

#include "s3vm/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "s3vm/error.hpp"

namespace s3vm {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw Error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(file, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(file);
  if (failed) throw Error("corrupt gzip stream in " + path.string());
  return out;
}

// Unbiased enough for shuffling and identical across standard libraries,
// unlike std::shuffle/std::uniform_int_distribution.
void fisher_yates(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Dataset parse_libsvm(std::string_view text, const ParseOptions& options) {
  Dataset data;
  std::set<double> raw_labels;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    SparseVector x;
    bool first = true;
    double raw_label = 0.0;
    while (!line.empty()) {
      std::size_t end = 0;
      while (end < line.size() && !is_space(line[end])) ++end;
      const std::string_view token = line.substr(0, end);
      line = trim(line.substr(end));

      if (first) {
        if (!parse_number(token, raw_label)) {
          throw ParseError(line_no, "bad label '" + std::string(token) + "'");
        }
        first = false;
        continue;
      }
      const std::size_t colon = token.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected index:value, got '" + std::string(token) + "'");
      }
      std::uint32_t index = 0;
      double value = 0.0;
      if (!parse_number(token.substr(0, colon), index) || index == 0) {
        throw ParseError(line_no, "bad feature index in '" + std::string(token) + "'");
      }
      if (!parse_number(token.substr(colon + 1), value)) {
        throw ParseError(line_no, "bad feature value in '" + std::string(token) + "'");
      }
      if (!x.empty() && index <= x.back().index) {
        throw ParseError(line_no, "feature indices must be strictly increasing");
      }
      x.push_back({index, value});
    }

    if (!x.empty()) data.n_features = std::max<std::size_t>(data.n_features, x.back().index);
    raw_labels.insert(raw_label);
    data.labels.push_back(raw_label > 0.0 ? Label::positive : Label::negative);
    data.samples.push_back(std::move(x));
  }

  if (data.samples.empty()) throw ParseError(0, "empty dataset");
  if (raw_labels.size() > 2 && !options.map_multiclass) {
    throw ParseError(0, "found " + std::to_string(raw_labels.size()) +
                            " distinct labels; multiclass input needs an explicit binary mapping");
  }
  data.labeled_idx.resize(data.samples.size());
  std::iota(data.labeled_idx.begin(), data.labeled_idx.end(), std::size_t{0});
  return data;
}

Dataset read_libsvm_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::string text;
  if (path.extension() == ".gz") {
    text = read_gzip(path);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = std::move(ss).str();
  }
  return parse_libsvm(text, options);
}

std::string write_libsvm(const Dataset& data) {
  std::string out;
  for (std::size_t s = 0; s < data.size(); ++s) {
    switch (data.labels[s]) {
      case Label::positive: out += "+1"; break;
      case Label::negative: out += "-1"; break;
      case Label::unknown: out += "0"; break;
    }
    for (const Feature& f : data.samples[s]) {
      out += ' ';
      out += std::to_string(f.index);
      out += ':';
      out += format_double(f.value);
    }
    out += '\n';
  }
  return out;
}

Dataset normalize_features(const Dataset& data) {
  if (data.empty()) throw InvalidArgument("normalize_features: empty dataset");
  const std::size_t n = data.size();
  const std::size_t dims = data.n_features;
  std::vector<double> lo(dims + 1, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dims + 1, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> count(dims + 1, 0);
  for (const SparseVector& x : data.samples) {
    for (const Feature& f : x) {
      lo[f.index] = std::min(lo[f.index], f.value);
      hi[f.index] = std::max(hi[f.index], f.value);
      ++count[f.index];
    }
  }
  std::vector<std::uint32_t> densified;
  for (std::size_t c = 1; c <= dims; ++c) {
    if (count[c] < n) {
      lo[c] = std::min(lo[c], 0.0);
      hi[c] = std::max(hi[c], 0.0);
    }
    if (lo[c] < 0.0 && hi[c] > lo[c] && count[c] < n) densified.push_back(static_cast<std::uint32_t>(c));
  }
  auto scale = [&](std::uint32_t c, double v) {
    return hi[c] > lo[c] ? (v - lo[c]) / (hi[c] - lo[c]) : 0.0;
  };

  Dataset out = data;
  for (std::size_t s = 0; s < n; ++s) {
    const SparseVector& x = data.samples[s];
    SparseVector y;
    y.reserve(x.size() + densified.size());
    auto it = x.begin();
    auto dt = densified.begin();
    while (it != x.end() || dt != densified.end()) {
      Feature f{};
      if (dt == densified.end() || (it != x.end() && it->index <= *dt)) {
        if (dt != densified.end() && it->index == *dt) ++dt;
        f = {it->index, scale(it->index, it->value)};
        ++it;
      } else {
        f = {*dt, scale(*dt, 0.0)};
        ++dt;
      }
      if (f.value != 0.0) y.push_back(f);
    }
    out.samples[s] = std::move(y);
  }
  return out;
}

Dataset make_split(const Dataset& full, const SplitSpec& spec) {
  const std::size_t n = full.size();
  if (spec.n_labeled < 2) throw InvalidArgument("make_split: n_labeled must be at least 2");
  if (spec.n_labeled >= n) {
    throw InvalidArgument("make_split: n_labeled (" + std::to_string(spec.n_labeled) +
                          ") must be below the sample count (" + std::to_string(n) + ")");
  }
  if (std::any_of(full.labels.begin(), full.labels.end(), [](Label y) { return y == Label::unknown; })) {
    throw InvalidArgument("make_split: source dataset must be fully labeled");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  fisher_yates(order, rng);

  std::vector<std::size_t> chosen;
  chosen.reserve(spec.n_labeled);
  if (spec.stratified) {
    const auto pos = std::find_if(order.begin(), order.end(),
                                  [&](std::size_t i) { return full.labels[i] == Label::positive; });
    const auto neg = std::find_if(order.begin(), order.end(),
                                  [&](std::size_t i) { return full.labels[i] == Label::negative; });
    if (pos == order.end() || neg == order.end()) {
      throw InvalidArgument("make_split: stratified split needs both classes");
    }
    chosen.push_back(*pos);
    chosen.push_back(*neg);
  }
  for (std::size_t i : order) {
    if (chosen.size() == spec.n_labeled) break;
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
  }

  Dataset out = full;
  std::vector<bool> in_l(n, false);
  for (std::size_t i : chosen) in_l[i] = true;
  out.labeled_idx.clear();
  out.unlabeled_idx.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (in_l[i]) {
      out.labeled_idx.push_back(i);
    } else {
      out.unlabeled_idx.push_back(i);
      out.labels[i] = Label::unknown;
    }
  }
  return out;
}

std::vector<Label> unlabeled_truth(const Dataset& full, const Dataset& split) {
  if (full.size() != split.size()) throw DimensionMismatch("unlabeled_truth: dataset sizes differ");
  std::vector<Label> truth;
  truth.reserve(split.unlabeled_idx.size());
  for (std::size_t j : split.unlabeled_idx) truth.push_back(full.labels[j]);
  return truth;
}

double positive_ratio(std::span<const Label> labels) {
  if (labels.empty()) return 0.0;
  const auto pos = std::count(labels.begin(), labels.end(), Label::positive);
  return static_cast<double>(pos) / static_cast<double>(labels.size());
}

std::vector<double> labeled_targets(const Dataset& data) {
  std::vector<double> y;
  y.reserve(data.labeled_idx.size());
  for (std::size_t i : data.labeled_idx) {
    if (data.labels[i] == Label::unknown) throw InvalidArgument("labeled sample without a label");
    y.push_back(to_double(data.labels[i]));
  }
  return y;
}

std::vector<RegistryEntry> parse_registry(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<RegistryEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "name") {
      entries.push_back({});
      entries.back().name = std::string(value);
      continue;
    }
    if (entries.empty()) throw ParseError(line_no, "'" + std::string(key) + "' before any name=");
    RegistryEntry& e = entries.back();
    auto number = [&](auto& out) {
      if (!parse_number(value, out)) throw ParseError(line_no, "bad value for " + std::string(key));
    };
    if (key == "path") {
      const std::filesystem::path p{std::string(value)};
      e.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (key == "C") {
      number(e.C);
    } else if (key == "Cstar_over_C") {
      number(e.cstar_over_c);
    } else if (key == "r") {
      double r = 0.0;
      number(r);
      e.r = r;
    } else if (key == "labeled") {
      number(e.n_labeled);
    } else if (key == "features") {
      std::size_t v = 0;
      number(v);
      e.n_features = v;
    } else if (key == "samples") {
      std::size_t v = 0;
      number(v);
      e.n_samples = v;
    } else {
      throw ParseError(line_no, "unknown registry key '" + std::string(key) + "'");
    }
  }
  for (const RegistryEntry& e : entries) {
    if (e.path.empty()) throw ParseError(0, "registry entry '" + e.name + "' has no path");
  }
  return entries;
}

std::vector<RegistryEntry> read_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open registry " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_registry(ss.str(), path.parent_path());
}

const RegistryEntry& find_entry(std::span<const RegistryEntry> registry, std::string_view name) {
  for (const RegistryEntry& e : registry) {
    if (e.name == name) return e;
  }
  throw InvalidArgument("unknown dataset '" + std::string(name) + "'");
}

}  // namespace s3vm
