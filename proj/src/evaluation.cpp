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

#include "winground/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "winground/error.hpp"

namespace winground {
namespace {

void require_valid(TimeSpan s, const std::string& what) {
  if (!(std::isfinite(s.start) && std::isfinite(s.end) && s.start < s.end)) {
    fail(ErrorKind::kValidation, what + " is not a valid span");
  }
}

void check_unique(std::span<const Annotation> anns) {
  std::set<std::string> seen;
  for (const auto& a : anns) {
    if (!seen.insert(a.query_id).second) {
      fail(ErrorKind::kValidation,
           "annotation for '" + a.query_id + "' appears twice");
    }
  }
}

}  // namespace

double temporal_iou(TimeSpan a, TimeSpan b) {
  require_valid(a, "first span");
  require_valid(b, "second span");
  const double inter =
      std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = a.length() + b.length() - inter;
  return inter / uni;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<Annotation> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "annotations line " + std::to_string(line);
    Annotation a;
    try {
      const auto rec = nlohmann::json::parse(text);
      a.query_id = rec.at("query_id").get<std::string>();
      a.video_id = rec.at("video_id").get<std::string>();
      a.gt = {rec.at("start_sec").get<double>(), rec.at("end_sec").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kParse, where + ": " + e.what());
    }
    if (!(a.gt.start >= 0.0)) {
      fail(ErrorKind::kValidation, where + ": negative start");
    }
    require_valid(a.gt, where);
    out.push_back(std::move(a));
  }
  check_unique(out);
  return out;
}

void save_annotations(std::span<const Annotation> anns,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& a : anns) {
    nlohmann::ordered_json rec;
    rec["query_id"] = a.query_id;
    rec["video_id"] = a.video_id;
    rec["start_sec"] = a.gt.start;
    rec["end_sec"] = a.gt.end;
    os << rec.dump() << '\n';
  }
  if (!os) fail(ErrorKind::kIo, "short write to " + path.string());
}

void save_predictions(const PredictionSet& preds,
                      std::span<const std::string> order,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  nlohmann::ordered_json header;
  header["run_config"] = preds.run_config.is_null()
                             ? nlohmann::ordered_json::object()
                             : preds.run_config;
  if (preds.efficiency) {
    header["efficiency"] = {
        {"windows_total", preds.efficiency->windows_total},
        {"windows_scored", preds.efficiency->windows_scored},
        {"reduction_ratio", preds.efficiency->reduction_ratio()}};
  }
  os << header.dump() << '\n';
  for (const auto& qid : order) {
    nlohmann::ordered_json rec;
    rec["query_id"] = qid;
    rec["predictions"] = nlohmann::ordered_json::array();
    if (auto it = preds.by_query.find(qid); it != preds.by_query.end()) {
      for (const auto& p : it->second) {
        rec["predictions"].push_back(
            {{"start_sec", p.span.start}, {"end_sec", p.span.end},
             {"score", p.score}});
      }
    }
    os << rec.dump() << '\n';
  }
  if (!os) fail(ErrorKind::kIo, "short write to " + path.string());
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  PredictionSet out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "predictions line " + std::to_string(line);
    try {
      const auto rec = nlohmann::ordered_json::parse(text);
      if (rec.contains("run_config")) {
        out.run_config = rec["run_config"];
        if (rec.contains("efficiency")) {
          const auto& e = rec["efficiency"];
          out.efficiency = Efficiency{e.at("windows_total").get<std::uint64_t>(),
                                      e.at("windows_scored").get<std::uint64_t>()};
        }
        continue;
      }
      const auto qid = rec.at("query_id").get<std::string>();
      std::vector<ScoredSpan> list;
      for (const auto& p : rec.at("predictions")) {
        ScoredSpan s{{p.at("start_sec").get<double>(),
                      p.at("end_sec").get<double>()},
                     p.at("score").get<double>()};
        require_valid(s.span, where);
        list.push_back(s);
      }
      std::stable_sort(list.begin(), list.end(),
                       [](const ScoredSpan& a, const ScoredSpan& b) {
                         return a.score > b.score;
                       });
      if (!out.by_query.emplace(qid, std::move(list)).second) {
        fail(ErrorKind::kValidation, where + ": query '" + qid + "' repeated");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  return out;
}

double recall_at(const PredictionSet& preds, std::span<const Annotation> anns,
                 std::size_t n, double theta) {
  if (n == 0) fail(ErrorKind::kConfig, "recall needs n >= 1");
  check_unique(anns);
  if (anns.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& a : anns) {
    auto it = preds.by_query.find(a.query_id);
    if (it == preds.by_query.end()) continue;
    const auto& list = it->second;
    const std::size_t top = std::min(n, list.size());
    for (std::size_t i = 0; i < top; ++i) {
      if (temporal_iou(list[i].span, a.gt) >= theta) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(anns.size());
}

EvalReport evaluate(const PredictionSet& preds,
                    std::span<const Annotation> anns,
                    std::span<const double> thresholds,
                    std::span<const std::size_t> ns) {
  EvalReport report;
  report.query_count = anns.size();
  report.efficiency = preds.efficiency;
  for (std::size_t n : ns) {
    for (double theta : thresholds) {
      report.recall[{n, theta}] = recall_at(preds, anns, n, theta);
    }
  }
  return report;
}

std::string metric_name(std::size_t n, double theta) {
  std::ostringstream os;
  os << 'R' << n << '@' << theta;
  return os.str();
}

std::string format_table(const EvalReport& report) {
  std::set<std::size_t> ns;
  std::set<double> thetas;
  for (const auto& [key, value] : report.recall) {
    ns.insert(key.first);
    thetas.insert(key.second);
  }
  std::ostringstream os;
  os << std::left << std::setw(8) << "metric";
  for (double t : thetas) {
    std::ostringstream head;
    head << "IoU=" << t;
    os << std::right << std::setw(10) << head.str();
  }
  os << '\n';
  for (std::size_t n : ns) {
    os << std::left << std::setw(8) << ("R" + std::to_string(n));
    for (double t : thetas) {
      os << std::right << std::setw(10) << std::fixed << std::setprecision(2)
         << 100.0 * report.recall.at({n, t});
    }
    os << '\n';
  }
  os << "queries: " << report.query_count << '\n';
  if (report.efficiency) {
    os << "windows scored/total: " << report.efficiency->windows_scored << '/'
       << report.efficiency->windows_total << " (reduction "
       << std::setprecision(4) << report.efficiency->reduction_ratio()
       << ")\n";
  }
  return os.str();
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  for (const auto& [key, value] : report.recall) {
    j[metric_name(key.first, key.second)] = value;
  }
  j["queries"] = report.query_count;
  if (report.efficiency) {
    j["windows_total"] = report.efficiency->windows_total;
    j["windows_scored"] = report.efficiency->windows_scored;
    j["reduction_ratio"] = report.efficiency->reduction_ratio();
  }
  return j;
}

}  // namespace winground
