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

#include "winground/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "winground/error.hpp"

namespace winground {

std::vector<Window> slice_windows(std::int64_t video_length,
                                  std::int64_t window_length) {
  if (window_length <= 0 || window_length % 2 != 0) {
    fail(ErrorKind::kConfig, "window length must be a positive even number, "
                             "got " + std::to_string(window_length));
  }
  if (video_length < 1) {
    fail(ErrorKind::kConfig,
         "video length must be >= 1, got " + std::to_string(video_length));
  }
  if (video_length <= window_length) return {{0, 0, video_length}};

  const std::int64_t stride = window_length / 2;
  std::vector<Window> windows;
  std::int64_t start = 0;
  for (; start + window_length <= video_length; start += stride) {
    windows.push_back({static_cast<std::int64_t>(windows.size()), start,
                       window_length});
  }
  if (windows.back().start + window_length < video_length) {
    windows.push_back({static_cast<std::int64_t>(windows.size()),
                       video_length - window_length, window_length});
  }
  return windows;
}

FrameSpan to_global(const Window& window, FrameSpan local) {
  if (local.begin < 0 || local.begin >= local.end ||
      local.end > window.length) {
    fail(ErrorKind::kBounds, "local span [" + std::to_string(local.begin) +
                                 ", " + std::to_string(local.end) +
                                 ") outside window of length " +
                                 std::to_string(window.length));
  }
  return {window.start + local.begin, window.start + local.end};
}

TimeSpan frames_to_seconds(FrameSpan span, double feature_hz) {
  if (span.begin < 0 || span.begin >= span.end) {
    fail(ErrorKind::kBounds, "empty or negative frame span [" +
                                 std::to_string(span.begin) + ", " +
                                 std::to_string(span.end) + ")");
  }
  if (!(feature_hz > 0.0) || !std::isfinite(feature_hz)) {
    fail(ErrorKind::kConfig, "feature rate must be positive");
  }
  return {static_cast<double>(span.begin) / feature_hz,
          static_cast<double>(span.end) / feature_hz};
}

FrameSpan seconds_to_frames(TimeSpan span, double feature_hz,
                            std::int64_t frame_count) {
  if (!(span.start < span.end) || !(feature_hz > 0.0)) {
    fail(ErrorKind::kValidation, "cannot convert an empty span to frames");
  }
  constexpr double kSnap = 1e-9;
  auto b = static_cast<std::int64_t>(std::floor(span.start * feature_hz + kSnap));
  auto e = static_cast<std::int64_t>(std::ceil(span.end * feature_hz - kSnap));
  b = std::clamp<std::int64_t>(b, 0, frame_count - 1);
  e = std::clamp<std::int64_t>(e, b + 1, frame_count);
  return {b, e};
}

}  // namespace winground
