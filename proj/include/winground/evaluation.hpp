// Copyright 2026 The Winground Authors.
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

#ifndef WINGROUND_EVALUATION_HPP_
#define WINGROUND_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "winground/spans.hpp"

namespace winground {

// Intersection over union of two half-open intervals; 0 when they only touch.
double temporal_iou(TimeSpan a, TimeSpan b);

struct Annotation {
  std::string query_id;
  std::string video_id;
  TimeSpan gt;
};

std::vector<Annotation> load_annotations(const std::filesystem::path& path);
void save_annotations(std::span<const Annotation> anns,
                      const std::filesystem::path& path);

struct ScoredSpan {
  TimeSpan span;
  double score = 0.0;
};

struct Efficiency {
  std::uint64_t windows_total = 0;
  std::uint64_t windows_scored = 0;

  // Fraction of windows the pre-filter removed before fine ranking.
  double reduction_ratio() const {
    return windows_total == 0
               ? 0.0
               : 1.0 - static_cast<double>(windows_scored) /
                           static_cast<double>(windows_total);
  }
};

// Contents of a predictions file. Lists are ordered by score descending.
struct PredictionSet {
  std::map<std::string, std::vector<ScoredSpan>> by_query;
  std::optional<Efficiency> efficiency;
  nlohmann::ordered_json run_config;
};

// One JSON record per line. The first line is a header holding the resolved
// run config and efficiency accounting; every further line is
//   {"query_id", "predictions": [{"start_sec", "end_sec", "score"}, ...]}.
// `order` fixes the line order of the query records.
void save_predictions(const PredictionSet& preds,
                      std::span<const std::string> order,
                      const std::filesystem::path& path);
PredictionSet load_predictions(const std::filesystem::path& path);

// Fraction of annotated queries whose top-n predictions contain one with
// IoU >= theta. Queries without predictions count as misses.
double recall_at(const PredictionSet& preds, std::span<const Annotation> anns,
                 std::size_t n, double theta);

struct EvalReport {
  std::map<std::pair<std::size_t, double>, double> recall;  // (n, theta)
  std::size_t query_count = 0;
  std::optional<Efficiency> efficiency;
};

EvalReport evaluate(const PredictionSet& preds,
                    std::span<const Annotation> anns,
                    std::span<const double> thresholds,
                    std::span<const std::size_t> ns);

std::string format_table(const EvalReport& report);
nlohmann::ordered_json to_json(const EvalReport& report);

// Label used for a metric cell, e.g. "R1@0.5".
std::string metric_name(std::size_t n, double theta);

}  // namespace winground

#endif  // WINGROUND_EVALUATION_HPP_
