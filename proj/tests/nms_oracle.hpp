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

#ifndef WINGROUND_TESTS_NMS_ORACLE_HPP_
#define WINGROUND_TESTS_NMS_ORACLE_HPP_

#include <vector>

#include "winground/evaluation.hpp"
#include "winground/random.hpp"
#include "winground/ranking.hpp"

namespace winground::testing {

// Reference suppression: scan for the best survivor, keep it, then delete
// everything overlapping it. Quadratic.
inline std::vector<RankedPrediction> reference_nms(
    std::vector<RankedPrediction> pool, double thr, std::size_t max_keep) {
  std::vector<RankedPrediction> kept;
  while (!pool.empty() && kept.size() < max_keep) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (ranks_before(pool[i], pool[best])) best = i;
    }
    const RankedPrediction top = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    kept.push_back(top);
    std::vector<RankedPrediction> rest;
    for (const auto& p : pool) {
      if (temporal_iou(p.span_seconds, top.span_seconds) < thr) rest.push_back(p);
    }
    pool = std::move(rest);
  }
  return kept;
}

// Spans on a coarse grid with coarse scores so ties and exact-threshold IoUs
// show up often. Every span is distinct.
inline std::vector<RankedPrediction> random_predictions(Rng& rng,
                                                        std::size_t max_n) {
  std::vector<RankedPrediction> out;
  const std::size_t n = 1 + rng.below(max_n);
  while (out.size() < n) {
    const double s = static_cast<double>(rng.below(40));
    const double e = s + 1.0 + static_cast<double>(rng.below(12));
    bool dup = false;
    for (const auto& p : out) {
      dup = dup || (p.span_seconds.start == s && p.span_seconds.end == e);
    }
    if (dup) continue;
    RankedPrediction p;
    p.query_id = "q";
    p.span_seconds = {s, e};
    p.r = static_cast<double>(rng.below(8)) / 4.0;
    out.push_back(p);
  }
  return out;
}

inline bool same_spans(const std::vector<RankedPrediction>& a,
                       const std::vector<RankedPrediction>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].span_seconds == b[i].span_seconds) || a[i].r != b[i].r) {
      return false;
    }
  }
  return true;
}

}  // namespace winground::testing

#endif  // WINGROUND_TESTS_NMS_ORACLE_HPP_
