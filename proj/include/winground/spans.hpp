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

#ifndef WINGROUND_SPANS_HPP_
#define WINGROUND_SPANS_HPP_

#include <cstdint>

namespace winground {

// Half-open frame interval [begin, end).
struct FrameSpan {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - begin; }
  bool contains(const FrameSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

// Interval in seconds, [start, end).
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

}  // namespace winground

#endif  // WINGROUND_SPANS_HPP_
