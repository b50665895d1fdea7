// Copyright 2026 The rgnn Authors.
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

#ifndef RGNN_REPORT_H_
#define RGNN_REPORT_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rgnn {

struct ReportRow {
  std::string experiment_id;
  int n = 0;
  int trial = 0;
  std::string metric;
  double value = 0.0;
  std::string flag;  // empty when the row counts toward statistics
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  nlohmann::json metadata = nlohmann::json::object();

  void add(const std::string& experiment_id, int n, int trial,
           const std::string& metric, double value, std::string flag = {});

  // Distinct metric names and n values, in first-seen order.
  std::vector<std::string> metrics() const;
  std::vector<int> sizes() const;

  // Unflagged values of `metric` at size n.
  std::vector<double> values(const std::string& metric, int n) const;
  // Median of the unflagged values; NaN when there are none.
  double median(const std::string& metric, int n) const;
  // Fraction of rows carrying a flag.
  double flag_rate() const;
};

double median(std::vector<double> values);

// Median-based decay over the n schedule of a report.
struct DecayCheck {
  std::string metric;
  double first_median = 0.0;
  double last_median = 0.0;
  double ratio = 0.0;  // last / first
  int nonincreasing_pairs = 0;
  int required_pairs = 0;
  bool decreasing = false;  // last < first and enough nonincreasing pairs
};

DecayCheck check_decay(const ConvergenceReport& report,
                       const std::string& metric);

// Writes the CSV (experiment_id,n,trial,metric,value,flag) to `path` and the
// metadata to the sidecar returned by metadata_path(path). Output depends only
// on the report contents.
void emit_report(const ConvergenceReport& report, const std::string& path);
std::string metadata_path(const std::string& csv_path);

}  // namespace rgnn

#endif  // RGNN_REPORT_H_
