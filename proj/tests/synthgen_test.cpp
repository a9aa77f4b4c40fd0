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

#include "winground/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_util.hpp"
#include "winground/pipeline.hpp"
#include "winground/prefilter.hpp"
#include "winground/ranking.hpp"

namespace winground {
namespace {

using testing::kind_of;
using testing::make_query;
using testing::make_video;
using testing::TempDir;

SynthConfig small(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.num_videos = 3;
  cfg.queries_per_video = 5;
  cfg.video_length = 500;
  cfg.dim = 16;
  cfg.seed = seed;
  return cfg;
}

const VideoFeatures& video_of(const SynthCorpus& c, const QueryFeatures& q) {
  for (const auto& v : c.videos) {
    if (v.video_id() == q.video_id) return v;
  }
  FAIL("unknown video");
  return c.videos.front();
}

TEST_CASE("same seed, same corpus") {
  const SynthCorpus a = generate_corpus(small(4));
  const SynthCorpus b = generate_corpus(small(4));
  REQUIRE(a.videos.size() == 3);
  REQUIRE(a.queries.size() == 15);
  for (std::size_t i = 0; i < a.videos.size(); ++i) CHECK(a.videos[i] == b.videos[i]);
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    CHECK(a.queries[i].cls == b.queries[i].cls);
    CHECK(a.planted[i] == b.planted[i]);
  }
  const SynthCorpus c = generate_corpus(small(5));
  CHECK_FALSE(a.videos[0] == c.videos[0]);
}

TEST_CASE("fifteen frames at 1.875 Hz make eight-second moments") {
  const SynthCorpus c = generate_corpus(small(1));
  for (const auto& a : c.annotations) CHECK(a.gt.length() == 8.0);
  for (const auto& p : c.planted) {
    CHECK(p.length() == 15);
    CHECK(p.begin % 4 == 0);
  }
}

TEST_CASE("planted spans are separable by direct scan") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SynthCorpus c = generate_corpus(small(seed));
    for (std::size_t i = 0; i < c.queries.size(); ++i) {
      const auto scores = frame_scores(video_of(c, c.queries[i]), c.queries[i]);
      const FrameSpan p = c.planted[i];
      double in = 0.0;
      double out = -INFINITY;
      for (std::int64_t t = 0; t < static_cast<std::int64_t>(scores.size()); ++t) {
        if (p.contains({t, t + 1})) {
          in += scores[t];
        } else {
          out = std::max(out, scores[t]);
        }
      }
      CHECK(in / static_cast<double>(p.length()) > out);
      CHECK(std::abs(std::accumulate(c.queries[i].cls.begin(),
                                     c.queries[i].cls.end(), 0.0,
                                     [](double s, double x) { return s + x * x; }) -
                     1.0) < 1e-12);
    }
  }
}

TEST_CASE("planted spans within a video do not overlap") {
  const SynthCorpus c = generate_corpus(small(9));
  for (std::size_t i = 0; i < c.planted.size(); ++i) {
    for (std::size_t j = i + 1; j < c.planted.size(); ++j) {
      if (c.queries[i].video_id != c.queries[j].video_id) continue;
      CHECK((c.planted[i].end <= c.planted[j].begin ||
             c.planted[j].end <= c.planted[i].begin));
    }
  }
}

TEST_CASE("ranges and unsnapped starts") {
  SynthConfig cfg = small(2);
  cfg.gt_min = 10;
  cfg.gt_max = 30;
  cfg.snap_stride = 0;
  const SynthCorpus c = generate_corpus(cfg);
  bool off_grid = false;
  for (const auto& p : c.planted) {
    CHECK(p.length() >= 10);
    CHECK(p.length() <= 30);
    off_grid = off_grid || p.begin % 4 != 0;
  }
  CHECK(off_grid);
}

TEST_CASE("invalid configurations") {
  SynthConfig cfg = small(1);
  cfg.gt_max = 600;
  CHECK(kind_of([&] { generate_corpus(cfg); }) == ErrorKind::kConfig);
  cfg = small(1);
  cfg.snr = 0.0;
  CHECK(kind_of([&] { generate_corpus(cfg); }) == ErrorKind::kConfig);
  cfg = small(1);
  cfg.gt_min = 20;
  cfg.gt_max = 10;
  CHECK(kind_of([&] { generate_corpus(cfg); }) == ErrorKind::kConfig);
  cfg = small(1);
  cfg.queries_per_video = 40;  // 40 x 15 frames cannot fit in 500
  CHECK(kind_of([&] { generate_corpus(cfg); }) == ErrorKind::kConfig);
}

TEST_CASE("written corpora load back") {
  TempDir dir;
  const SynthCorpus c = generate_corpus(small(6));
  write_corpus(c, dir.path());
  const auto store = VideoStore::load_directory(dir / "features");
  CHECK(store.size() == 3);
  CHECK(store.at("vid001") == c.videos[1]);
  const auto qs = load_queries(dir / "queries.jsonl");
  REQUIRE(qs.size() == 15);
  CHECK(qs[7].cls == c.queries[7].cls);
  CHECK(qs[7].query_id == "vid001_q02");
  const auto anns = load_annotations(dir / "annotations.jsonl");
  CHECK(anns[7].gt == c.annotations[7].gt);
}

TEST_CASE("brute force on a constant video picks the earliest shortest anchor") {
  std::vector<std::vector<float>> rows(100, std::vector<float>{0.5f, 0.25f});
  const auto vf = make_video("c", rows);
  const auto best = brute_force_ground(vf, make_query("q", "c", {1, 1}), {});
  CHECK(best.span == FrameSpan{0, 8});
  CHECK(best.score == 0.75);
}

TEST_CASE("brute force refuses long videos") {
  std::vector<std::vector<float>> rows(kBruteForceMaxFrames + 1,
                                       std::vector<float>{1.0f});
  const auto vf = make_video("l", rows);
  CHECK(kind_of([&] { brute_force_ground(vf, make_query("q", "l", {1}), {}); }) ==
        ErrorKind::kConfig);
}

TEST_CASE("brute force recovers planted spans") {
  const SynthCorpus c = generate_corpus(small(12));
  for (std::size_t i = 0; i < c.queries.size(); ++i) {
    const auto best = brute_force_ground(video_of(c, c.queries[i]), c.queries[i], {});
    const double hz = c.videos[0].feature_hz();
    CHECK(temporal_iou(frames_to_seconds(best.span, hz), c.annotations[i].gt) >=
          0.5);
  }
}

TEST_CASE("full-budget pipeline reproduces the brute-force answer") {
  const SynthCorpus c = generate_corpus(small(21));
  LocalizeConfig cfg;
  cfg.topk = 1000;
  const AdapterParams id = identity_adapter(16);
  for (std::size_t i = 0; i < c.queries.size(); ++i) {
    const auto& vf = video_of(c, c.queries[i]);
    const auto r = localize(c.queries[i], vf, id, cfg);
    REQUIRE_FALSE(r.predictions.empty());
    CHECK(r.predictions[0].span_frames ==
          brute_force_ground(vf, c.queries[i], cfg.anchors).span);
  }
}

}  // namespace
}  // namespace winground
