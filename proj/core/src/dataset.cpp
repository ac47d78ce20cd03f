//
// Copyright 2026 The dpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpfl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "dpfl/errors.hpp"
#include "dpfl/rng.hpp"

namespace dpfl::data {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string at_line(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = features.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels[i]);
  out.num_classes = num_classes;
  out.name = name;
  out.feature_names = feature_names;
  return out;
}

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw DataError("dataset '" + name + "': feature rows and label count differ");
  }
  if (!features.all_finite()) throw DataError("dataset '" + name + "': non-finite feature");
  for (Label y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw DataError("dataset '" + name + "': label " + std::to_string(y) + " out of range");
    }
  }
}

void SplitSpec::validate() const {
  if (!(train > 0.0 && val > 0.0 && test > 0.0)) {
    throw std::invalid_argument("split fractions must be positive");
  }
  if (std::fabs(train + val + test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

void SyntheticSpec::validate() const {
  if (n_samples < 2) throw std::invalid_argument("synthetic n_samples must be >= 2");
  if (n_features < 1) throw std::invalid_argument("synthetic n_features must be >= 1");
  if (!(noise_std > 0.0)) throw std::invalid_argument("synthetic noise_std must be > 0");
  if (!std::isfinite(class_separation)) {
    throw std::invalid_argument("synthetic class_separation must be finite");
  }
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto f : split_fields(line)) header.emplace_back(trim(f));
  if (header.size() < 2) {
    throw DataError(at_line(path, line_no) + "header needs at least one feature and a label");
  }
  if (header.back() != "label") {
    throw DataError(at_line(path, line_no) + "final header column must be 'label'");
  }
  const std::size_t n_feat = header.size() - 1;

  std::vector<double> values;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(at_line(path, line_no) + "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < n_feat; ++c) {
      const std::string_view f = trim(fields[c]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw DataError(at_line(path, line_no) + "column '" + header[c] +
                        "': malformed number '" + std::string(f) + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(at_line(path, line_no) + "column '" + header[c] + "': non-finite value");
      }
      values.push_back(v);
    }
    const std::string_view lf = trim(fields.back());
    long long y = 0;
    auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), y);
    if (ec != std::errc() || ptr != lf.data() + lf.size() || lf.empty()) {
      throw DataError(at_line(path, line_no) + "label '" + std::string(lf) +
                      "' is not an integer");
    }
    if (y < 0 || y > 1'000'000) {
      throw DataError(at_line(path, line_no) + "label " + std::to_string(y) + " out of range");
    }
    labels.push_back(static_cast<Label>(y));
  }
  if (labels.empty()) throw DataError(path.string() + ": no data rows");

  Dataset ds;
  ds.features = Matrix(labels.size(), n_feat, std::move(values));
  ds.num_classes = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  ds.num_classes = std::max<std::size_t>(ds.num_classes, 2);
  ds.labels = std::move(labels);
  ds.name = path.stem().string();
  ds.feature_names.assign(header.begin(), header.end() - 1);
  return ds;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  std::string buf;
  for (std::size_t c = 0; c < dataset.num_features(); ++c) {
    buf += c < dataset.feature_names.size() ? dataset.feature_names[c] : "f" + std::to_string(c);
    buf += ',';
  }
  buf += "label\n";
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    for (double v : dataset.features.row(r)) {
      append_double(buf, v);
      buf += ',';
    }
    buf += std::to_string(dataset.labels[r]);
    buf += '\n';
  }
  out << buf;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

SplitResult split(const Dataset& dataset, const SplitSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = dataset.size();
  if (n < 5) throw DataError("split: need at least 5 samples, have " + std::to_string(n));
  // The small slack keeps exact products such as 0.6 * 100 from rounding down.
  const auto n_train = static_cast<std::size_t>(std::floor(spec.train * static_cast<double>(n) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(spec.val * static_cast<double>(n) + 1e-9));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw DataError("split: degenerate partition for N=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, Stream::kSplit);
  std::shuffle(order.begin(), order.end(), rng);
  auto part = [&](std::size_t from, std::size_t to) {
    return dataset.subset(std::span<const std::size_t>(order).subspan(from, to - from));
  };
  SplitResult out{part(0, n_train), part(n_train, n_train + n_val), part(n_train + n_val, n)};
  out.train.name = dataset.name + "/train";
  out.val.name = dataset.name + "/val";
  out.test.name = dataset.name + "/test";
  return out;
}

Dataset synth_blobs(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_rng(seed, Stream::kSynth);
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  Dataset ds;
  ds.features = Matrix(spec.n_samples, spec.n_features);
  ds.labels.resize(spec.n_samples);
  ds.num_classes = 2;
  ds.name = "blobs";
  for (std::size_t c = 0; c < spec.n_features; ++c) ds.feature_names.push_back("x" + std::to_string(c));
  const double half = 0.5 * spec.class_separation;
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const Label y = static_cast<Label>(i % 2);
    ds.labels[i] = y;
    auto row = ds.features.row(i);
    for (std::size_t c = 0; c < spec.n_features; ++c) row[c] = noise(rng);
    row[0] += y == 1 ? half : -half;
  }
  return ds;
}

Normalizer normalize_fit(const Dataset& train) {
  const std::size_t n = train.size();
  const std::size_t d = train.num_features();
  if (n == 0) throw DataError("normalize_fit: empty training set");
  Normalizer norm{Vector(d, 0.0), Vector(d, 1.0)};
  for (std::size_t r = 0; r < n; ++r) {
    auto row = train.features.row(r);
    for (std::size_t c = 0; c < d; ++c) norm.mean[c] += row[c];
  }
  for (double& m : norm.mean) m /= static_cast<double>(n);
  Vector var(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = train.features.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = row[c] - norm.mean[c];
      var[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(n));
    if (sd > 0.0) {
      norm.scale[c] = sd;
    } else {
      // Zero-variance columns pass through unchanged.
      norm.mean[c] = 0.0;
      norm.scale[c] = 1.0;
    }
  }
  return norm;
}

Dataset normalize_apply(const Normalizer& normalizer, const Dataset& dataset) {
  if (normalizer.mean.size() != dataset.num_features()) {
    throw DataError("normalize_apply: feature count does not match the fitted normalizer");
  }
  Dataset out = dataset;
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = (row[c] - normalizer.mean[c]) / normalizer.scale[c];
    }
  }
  return out;
}

}  // namespace dpfl::data
