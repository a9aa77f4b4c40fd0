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

#ifndef WINGROUND_SYNTHGEN_HPP_
#define WINGROUND_SYNTHGEN_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "winground/evaluation.hpp"
#include "winground/feature_store.hpp"
#include "winground/proposals.hpp"

namespace winground {

struct SynthConfig {
  std::size_t num_videos = 10;
  std::size_t queries_per_video = 20;
  std::size_t video_length = 1000;  // frames
  std::size_t dim = 32;
  double snr = 10.0;
  std::size_t gt_min = 15;  // planted span length range, frames
  std::size_t gt_max = 15;
  double feature_hz = 1.875;
  std::uint64_t seed = 42;
  std::int64_t snap_stride = 4;  // 0 leaves planted starts off the lattice
};

void validate(const SynthConfig& cfg);

struct SynthCorpus {
  std::vector<VideoFeatures> videos;
  std::vector<QueryFeatures> queries;
  std::vector<Annotation> annotations;
  std::vector<FrameSpan> planted;  // parallel to queries
  std::size_t regenerations = 0;   // videos redrawn after a failed check
};

// Every frame starts as a unit-norm Gaussian noise vector. Each query draws
// a unit-norm q_cls and a non-overlapping span; frames in the span become
// normalize(noise + snr * q_cls). A video is redrawn (and counted in
// `regenerations`) if any of its queries has in-span mean score not above
// the out-of-span maximum.
SynthCorpus generate_corpus(const SynthConfig& cfg);

// Writes features/<video_id>.conef, queries.jsonl and annotations.jsonl.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

inline constexpr std::size_t kBruteForceMaxFrames = 2000;

struct GroundedSpan {
  FrameSpan span;
  double score = 0.0;
};

// Scores every anchor-lattice span over the whole video (no windows, no
// pre-filter) by mean raw v_j . q_cls and returns the best; ties go to the
// earlier start, then the shorter span. Refuses videos longer than
// kBruteForceMaxFrames.
GroundedSpan brute_force_ground(const VideoFeatures& vf, const QueryFeatures& q,
                                const AnchorConfig& anchors);

}  // namespace winground

#endif  // WINGROUND_SYNTHGEN_HPP_
