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

#include "rgnn/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rgnn {

void ConvergenceReport::add(const std::string& experiment_id, int n, int trial,
                            const std::string& metric, double value,
                            std::string flag) {
  rows.push_back({experiment_id, n, trial, metric, value, std::move(flag)});
}

std::vector<std::string> ConvergenceReport::metrics() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.metric) == out.end()) {
      out.push_back(r.metric);
    }
  }
  return out;
}

std::vector<int> ConvergenceReport::sizes() const {
  std::vector<int> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.n) == out.end()) out.push_back(r.n);
  }
  return out;
}

std::vector<double> ConvergenceReport::values(const std::string& metric,
                                              int n) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.metric == metric && r.n == n && r.flag.empty()) out.push_back(r.value);
  }
  return out;
}

double ConvergenceReport::median(const std::string& metric, int n) const {
  return rgnn::median(values(metric, n));
}

double ConvergenceReport::flag_rate() const {
  if (rows.empty()) return 0.0;
  const auto flagged = std::count_if(rows.begin(), rows.end(),
                                     [](const ReportRow& r) { return !r.flag.empty(); });
  return static_cast<double>(flagged) / static_cast<double>(rows.size());
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const auto m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

DecayCheck check_decay(const ConvergenceReport& report,
                       const std::string& metric) {
  std::vector<int> ns;
  for (int n : report.sizes()) {
    if (!report.values(metric, n).empty()) ns.push_back(n);
  }
  std::sort(ns.begin(), ns.end());
  DecayCheck d;
  d.metric = metric;
  if (ns.size() < 2) return d;
  std::vector<double> med;
  for (int n : ns) med.push_back(report.median(metric, n));
  d.first_median = med.front();
  d.last_median = med.back();
  d.ratio = d.last_median / d.first_median;
  for (std::size_t i = 0; i + 1 < med.size(); ++i) {
    if (med[i + 1] <= med[i]) ++d.nonincreasing_pairs;
  }
  d.required_pairs = std::min<int>(3, static_cast<int>(med.size()) - 1);
  d.decreasing = d.last_median < d.first_median &&
                 d.nonincreasing_pairs >= d.required_pairs;
  return d;
}

std::string metadata_path(const std::string& csv_path) {
  const auto slash = csv_path.find_last_of('/');
  const auto dot = csv_path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv_path.substr(0, dot) + ".meta.json";
  }
  return csv_path + ".meta.json";
}

void emit_report(const ConvergenceReport& report, const std::string& path) {
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write report to " + path);
  csv << "experiment_id,n,trial,metric,value,flag\n";
  char buf[64];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    csv << r.experiment_id << ',' << r.n << ',' << r.trial << ',' << r.metric
        << ',' << buf << ',' << r.flag << '\n';
  }
  if (!csv) throw std::runtime_error("failed writing " + path);

  nlohmann::json meta = report.metadata;
  meta["rows"] = report.rows.size();
  meta["flag_rate"] = report.flag_rate();
  std::ofstream side(metadata_path(path), std::ios::binary);
  if (!side) throw std::runtime_error("cannot write " + metadata_path(path));
  side << meta.dump(2) << '\n';
}

}  // namespace rgnn
