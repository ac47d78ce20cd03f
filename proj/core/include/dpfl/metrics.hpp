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

#ifndef DPFL_METRICS_HPP_
#define DPFL_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "dpfl/config.hpp"

namespace dpfl::exp {

inline constexpr const char* kMetricsSchema = "dpfl-metrics/1";

struct ClientMetric {
  std::size_t id = 0;
  double epsilon = 0.0;
  bool active = true;

  friend bool operator==(const ClientMetric&, const ClientMetric&) = default;
};

// One line per epoch (central modes) or per round (federated modes).
struct MetricRecord {
  std::string unit = "epoch";  // "epoch" or "round"
  std::size_t index = 0;
  std::uint64_t steps = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
  std::optional<double> epsilon_spent;
  std::optional<double> wall_time_s;
  // Federated runs only.
  std::vector<std::size_t> selected;
  std::vector<std::size_t> dropped;
  // LDP runs only: epsilon spent by every client after this round.
  std::vector<ClientMetric> clients;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

struct MetricsSummary {
  std::size_t records = 0;
  std::uint64_t steps = 0;
  std::optional<double> best_test_acc;
  std::optional<double> final_test_acc;
  std::optional<double> final_epsilon;
  std::optional<double> sigma;

  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

MetricsSummary summarize(const std::vector<MetricRecord>& records, std::uint64_t steps,
                         std::optional<double> sigma);

// Newline-delimited JSON: a header line carrying the effective config, one
// line per record, and a closing summary line.
class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, const KeyValues& config);

  void write(const MetricRecord& record);
  void finish(const MetricsSummary& summary);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void emit_metrics(const std::filesystem::path& path, const KeyValues& config,
                  const std::vector<MetricRecord>& records, const MetricsSummary& summary);

struct MetricsFile {
  KeyValues config;
  std::vector<MetricRecord> records;
  std::optional<MetricsSummary> summary;
};

MetricsFile read_metrics(const std::filesystem::path& path);

}  // namespace dpfl::exp

#endif  // DPFL_METRICS_HPP_
