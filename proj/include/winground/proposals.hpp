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

#ifndef WINGROUND_PROPOSALS_HPP_
#define WINGROUND_PROPOSALS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winground/spans.hpp"
#include "winground/windowing.hpp"

namespace winground {

struct Proposal {
  std::string query_id;
  std::int64_t window_index = 0;
  FrameSpan span_frames;  // global, half-open
  TimeSpan span_seconds;
  double p = 0.0;                // proposal score
  std::optional<double> m;       // fine-grained matching score
};

struct AnchorConfig {
  std::vector<std::int64_t> lengths = {8, 16, 32, 64};
  std::int64_t stride = 4;
};

void validate(const AnchorConfig& anchors);

// Offset of the first anchor start inside `window` such that every anchor
// start lands on the global lattice {0, stride, 2*stride, ...}.
std::int64_t lattice_offset(const Window& window, std::int64_t stride);

// Enumerates [b, b + len) for every anchor length (ascending) and every
// b = offset, offset + stride, ... with b + len <= window.length. Scores each
// span by the mean of `saliency` (window-local, one value per frame).
std::vector<Proposal> generate_anchor_proposals(
    const std::string& query_id, const Window& window,
    std::span<const double> saliency, const AnchorConfig& anchors,
    double feature_hz, std::int64_t offset = 0);

// Closed-form size of the anchor grid generated above.
std::size_t anchor_count(std::int64_t window_length,
                         const AnchorConfig& anchors, std::int64_t offset = 0);

struct WindowRef {
  Window window;
  double feature_hz = 1.0;
};

// Resolves (query_id, window_index) to the window geometry of that query's
// video, or nullopt if either is unknown.
using WindowResolver = std::function<std::optional<WindowRef>(
    const std::string& query_id, std::int64_t window_index)>;

// Reads externally produced proposals, one JSON record per line:
//   {"query_id", "window_index", "b", "e", "p"}
// with b, e window-local half-open frame offsets.
std::vector<Proposal> ingest_external_proposals(
    const std::filesystem::path& path, const WindowResolver& resolve);

}  // namespace winground

#endif  // WINGROUND_PROPOSALS_HPP_
