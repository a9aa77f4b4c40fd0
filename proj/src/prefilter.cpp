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

#include "winground/prefilter.hpp"

#include <algorithm>
#include <string>

#include "winground/error.hpp"

namespace winground {

double dot(std::span<const float> v, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    acc += static_cast<double>(v[k]) * q[k];
  }
  return acc;
}

std::vector<double> frame_scores(const VideoFeatures& vf,
                                 const QueryFeatures& q) {
  check_pairing(vf, q);
  std::vector<double> scores(vf.count());
  for (std::size_t j = 0; j < vf.count(); ++j) {
    scores[j] = dot(vf.row(j), q.cls);
  }
  return scores;
}

std::vector<WindowScore> window_scores(std::span<const double> frame_scores,
                                       std::span<const Window> windows) {
  std::vector<WindowScore> out;
  out.reserve(windows.size());
  for (const Window& w : windows) {
    if (w.length <= 0 || w.start < 0 ||
        static_cast<std::size_t>(w.start + w.length) > frame_scores.size()) {
      fail(ErrorKind::kBounds, "window " + std::to_string(w.index) +
                                   " exceeds the frame score list");
    }
    std::int64_t best = w.start;
    for (std::int64_t j = w.start + 1; j < w.start + w.length; ++j) {
      if (frame_scores[j] > frame_scores[best]) best = j;
    }
    out.push_back({w.index, frame_scores[best], best});
  }
  return out;
}

std::vector<WindowScore> select_top_k(std::span<const WindowScore> scores,
                                      std::size_t k) {
  if (k == 0) fail(ErrorKind::kConfig, "top-k must be >= 1");
  std::vector<WindowScore> out(scores.begin(), scores.end());
  const auto better = [](const WindowScore& a, const WindowScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.window_index < b.window_index;
  };
  const std::size_t keep = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + keep, out.end(), better);
  out.resize(keep);
  return out;
}

}  // namespace winground
