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

#ifndef WINGROUND_RANKING_HPP_
#define WINGROUND_RANKING_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "winground/adapter.hpp"
#include "winground/feature_store.hpp"
#include "winground/prefilter.hpp"
#include "winground/proposals.hpp"
#include "winground/windowing.hpp"

namespace winground {

inline constexpr double kDefaultNmsIou = 0.5;
inline constexpr std::size_t kDefaultMaxKeep = 5;

struct RankedPrediction {
  std::string query_id;
  std::int64_t window_index = 0;
  FrameSpan span_frames;
  TimeSpan span_seconds;
  double r = 0.0;  // p_norm + m_norm
  double p_norm = 0.0;
  double m_norm = 0.0;
};

// m_j = h_j . q_cls, with h_j the mean adapted feature of proposal j.
std::vector<double> matching_scores(const AdapterParams& params,
                                    const VideoFeatures& vf,
                                    const QueryFeatures& q,
                                    std::span<const Proposal> proposals);

// (x - min) / (max - min); a constant list maps to 0.5 everywhere.
std::vector<double> min_max_normalize(std::span<const double> xs);

std::vector<double> fuse(std::span<const double> p_norm,
                         std::span<const double> m_norm);

// Ranking order: higher r first, then earlier start, then shorter span.
bool ranks_before(const RankedPrediction& a, const RankedPrediction& b);

// Greedy temporal NMS in seconds. Keeps the best remaining prediction and
// drops every other with IoU >= iou_threshold against it, until max_keep
// predictions are kept or none remain.
std::vector<RankedPrediction> nms(std::vector<RankedPrediction> preds,
                                  double iou_threshold, std::size_t max_keep);

struct LocalizeConfig {
  std::int64_t window_length = kDefaultWindowLength;
  std::size_t topk = kDefaultTopK;
  AnchorConfig anchors;
  double nms_iou = kDefaultNmsIou;
  std::size_t max_keep = kDefaultMaxKeep;
  bool per_window_norm = false;
};

void validate(const LocalizeConfig& config);

struct GroundingResult {
  std::string query_id;
  std::vector<RankedPrediction> predictions;
  std::vector<WindowScore> selected;  // pre-filter output, best first
  std::size_t windows_total = 0;
  std::size_t proposal_count = 0;
};

// The full coarse-to-fine pipeline for one query: slice, pre-filter, score
// proposals inside the kept windows, normalize, fuse and suppress. When
// `external` is non-null its proposals for this query replace the anchor
// generator; proposals in windows dropped by the pre-filter are ignored.
GroundingResult localize(const QueryFeatures& q, const VideoFeatures& vf,
                         const AdapterParams& params,
                         const LocalizeConfig& config,
                         const std::vector<Proposal>* external = nullptr);

// Resolver over a video store, for ingesting external proposals.
WindowResolver make_window_resolver(const VideoStore& store,
                                    std::span<const QueryFeatures> queries,
                                    std::int64_t window_length);

}  // namespace winground

#endif  // WINGROUND_RANKING_HPP_
