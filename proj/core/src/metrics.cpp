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

#include "dpfl/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dpfl/errors.hpp"

namespace dpfl::exp {
namespace {

using nlohmann::json;

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

json record_to_json(const MetricRecord& r) {
  json j;
  j["type"] = r.unit;
  j["index"] = r.index;
  j["steps"] = r.steps;
  j["train_loss"] = r.train_loss;
  j["train_acc"] = r.train_acc;
  j["test_loss"] = r.test_loss;
  j["test_acc"] = r.test_acc;
  put_optional(j, "epsilon_spent", r.epsilon_spent);
  put_optional(j, "wall_time_s", r.wall_time_s);
  if (r.unit == "round") {
    j["selected"] = r.selected;
    j["dropped"] = r.dropped;
  }
  if (!r.clients.empty()) {
    json arr = json::array();
    for (const ClientMetric& c : r.clients) {
      arr.push_back({{"id", c.id}, {"epsilon", c.epsilon}, {"active", c.active}});
    }
    j["clients"] = std::move(arr);
  }
  return j;
}

MetricRecord record_from_json(const json& j) {
  MetricRecord r;
  r.unit = j.at("type").get<std::string>();
  r.index = j.at("index").get<std::size_t>();
  r.steps = j.at("steps").get<std::uint64_t>();
  r.train_loss = j.at("train_loss").get<double>();
  r.train_acc = j.at("train_acc").get<double>();
  r.test_loss = j.at("test_loss").get<double>();
  r.test_acc = j.at("test_acc").get<double>();
  r.epsilon_spent = get_optional<double>(j, "epsilon_spent");
  r.wall_time_s = get_optional<double>(j, "wall_time_s");
  if (auto it = j.find("selected"); it != j.end()) r.selected = it->get<std::vector<std::size_t>>();
  if (auto it = j.find("dropped"); it != j.end()) r.dropped = it->get<std::vector<std::size_t>>();
  if (auto it = j.find("clients"); it != j.end()) {
    for (const json& c : *it) {
      r.clients.push_back({c.at("id").get<std::size_t>(), c.at("epsilon").get<double>(),
                           c.at("active").get<bool>()});
    }
  }
  return r;
}

json summary_to_json(const MetricsSummary& s) {
  json j;
  j["type"] = "summary";
  j["records"] = s.records;
  j["steps"] = s.steps;
  j["best_test_acc"] = s.best_test_acc ? json(*s.best_test_acc) : json(nullptr);
  j["final_test_acc"] = s.final_test_acc ? json(*s.final_test_acc) : json(nullptr);
  put_optional(j, "final_epsilon", s.final_epsilon);
  put_optional(j, "sigma", s.sigma);
  return j;
}

}  // namespace

MetricsSummary summarize(const std::vector<MetricRecord>& records, std::uint64_t steps,
                         std::optional<double> sigma) {
  MetricsSummary s;
  s.records = records.size();
  s.steps = steps;
  s.sigma = sigma;
  for (const MetricRecord& r : records) {
    if (!s.best_test_acc || r.test_acc > *s.best_test_acc) s.best_test_acc = r.test_acc;
  }
  if (!records.empty()) {
    s.final_test_acc = records.back().test_acc;
    s.final_epsilon = records.back().epsilon_spent;
  }
  return s;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, const KeyValues& config)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open metrics file '" + path.string() + "'");
  json header;
  header["type"] = "header";
  header["schema"] = kMetricsSchema;
  json cfg = json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  header["config"] = std::move(cfg);
  out_ << header.dump() << '\n';
}

void MetricsWriter::write(const MetricRecord& record) {
  out_ << record_to_json(record).dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
}

void MetricsWriter::finish(const MetricsSummary& summary) {
  out_ << summary_to_json(summary).dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
}

void emit_metrics(const std::filesystem::path& path, const KeyValues& config,
                  const std::vector<MetricRecord>& records, const MetricsSummary& summary) {
  MetricsWriter w(path, config);
  for (const MetricRecord& r : records) w.write(r);
  w.finish(summary);
}

MetricsFile read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file '" + path.string() + "'");
  MetricsFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      if (j.at("schema").get<std::string>() != kMetricsSchema) {
        throw std::runtime_error(path.string() + ": unsupported metrics schema");
      }
      for (const auto& [k, v] : j.at("config").items()) file.config[k] = v.get<std::string>();
    } else if (type == "summary") {
      MetricsSummary s;
      s.records = j.at("records").get<std::size_t>();
      s.steps = j.at("steps").get<std::uint64_t>();
      s.best_test_acc = get_optional<double>(j, "best_test_acc");
      s.final_test_acc = get_optional<double>(j, "final_test_acc");
      s.final_epsilon = get_optional<double>(j, "final_epsilon");
      s.sigma = get_optional<double>(j, "sigma");
      file.summary = s;
    } else {
      file.records.push_back(record_from_json(j));
    }
  }
  return file;
}

}  // namespace dpfl::exp
