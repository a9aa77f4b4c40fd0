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

#ifndef WINGROUND_PREFILTER_HPP_
#define WINGROUND_PREFILTER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "winground/feature_store.hpp"
#include "winground/windowing.hpp"

namespace winground {

inline constexpr std::size_t kDefaultTopK = 20;

struct WindowScore {
  std::int64_t window_index = 0;
  double score = 0.0;
  std::int64_t argmax_frame = 0;  // global index; ties resolve to the lowest

  friend bool operator==(const WindowScore&, const WindowScore&) = default;
};

// a_j = v_j . q_cls for every frame, accumulated in double.
std::vector<double> frame_scores(const VideoFeatures& vf,
                                 const QueryFeatures& q);

// A_i = max of a_j over the frames of window i.
std::vector<WindowScore> window_scores(std::span<const double> frame_scores,
                                       std::span<const Window> windows);

// Keeps the min(k, N_w) best windows ordered by (score desc, index asc).
std::vector<WindowScore> select_top_k(std::span<const WindowScore> scores,
                                      std::size_t k);

double dot(std::span<const float> v, std::span<const double> q);

}  // namespace winground

#endif  // WINGROUND_PREFILTER_HPP_
