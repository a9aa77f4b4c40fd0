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

#ifndef WINGROUND_WINDOWING_HPP_
#define WINGROUND_WINDOWING_HPP_

#include <cstdint>
#include <vector>

#include "winground/spans.hpp"

namespace winground {

inline constexpr std::int64_t kDefaultWindowLength = 90;

struct Window {
  std::int64_t index = 0;
  std::int64_t start = 0;   // global frame index of the first frame
  std::int64_t length = 0;  // < L_w only when the whole video is shorter

  FrameSpan span() const { return {start, start + length}; }
  friend bool operator==(const Window&, const Window&) = default;
};

// Slides a window of `window_length` frames with stride window_length / 2.
// When the last regular window stops short of the video end, one extra window
// is snapped to [video_length - window_length, video_length).
std::vector<Window> slice_windows(std::int64_t video_length,
                                  std::int64_t window_length);

// Maps a window-local half-open span to global frames.
FrameSpan to_global(const Window& window, FrameSpan local);

TimeSpan frames_to_seconds(FrameSpan span, double feature_hz);

// Smallest frame span covering `span`, clamped to [0, frame_count). Frame
// boundaries within 1e-9 frames of an endpoint snap to it.
FrameSpan seconds_to_frames(TimeSpan span, double feature_hz,
                            std::int64_t frame_count);

}  // namespace winground

#endif  // WINGROUND_WINDOWING_HPP_
