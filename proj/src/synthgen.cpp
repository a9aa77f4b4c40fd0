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
#include <cstdio>

#include "winground/error.hpp"
#include "winground/random.hpp"
#include "winground/windowing.hpp"

namespace winground {
namespace {

constexpr std::size_t kMaxVideoAttempts = 64;
constexpr std::size_t kMaxPlacementTries = 10000;

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

std::string video_name(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "vid%03zu", v);
  return buf;
}

struct PlantedQuery {
  std::vector<double> q;
  FrameSpan span;
};

struct VideoDraw {
  std::vector<float> data;
  std::vector<PlantedQuery> queries;
};

VideoDraw draw_video(const SynthConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.video_length;
  const std::size_t d = cfg.dim;
  std::vector<std::vector<double>> frames(n);
  for (auto& f : frames) f = unit_gaussian(rng, d);

  VideoDraw out;
  std::vector<FrameSpan> taken;
  for (std::size_t k = 0; k < cfg.queries_per_video; ++k) {
    PlantedQuery pq;
    pq.q = unit_gaussian(rng, d);
    const auto len = static_cast<std::int64_t>(
        cfg.gt_min + rng.below(cfg.gt_max - cfg.gt_min + 1));
    const std::int64_t step = cfg.snap_stride > 0 ? cfg.snap_stride : 1;
    const std::int64_t slots =
        (static_cast<std::int64_t>(n) - len) / step + 1;
    bool placed = false;
    for (std::size_t tries = 0; tries < kMaxPlacementTries && !placed; ++tries) {
      const std::int64_t b =
          step * static_cast<std::int64_t>(rng.below(
                     static_cast<std::uint64_t>(slots)));
      const FrameSpan span{b, b + len};
      placed = std::none_of(taken.begin(), taken.end(), [&](FrameSpan t) {
        return span.begin < t.end && t.begin < span.end;
      });
      if (placed) pq.span = span;
    }
    if (!placed) {
      fail(ErrorKind::kConfig, "cannot place " +
                                   std::to_string(cfg.queries_per_video) +
                                   " non-overlapping spans in a video of " +
                                   std::to_string(n) + " frames");
    }
    taken.push_back(pq.span);
    for (std::int64_t t = pq.span.begin; t < pq.span.end; ++t) {
      auto& f = frames[t];
      double norm2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        f[i] += cfg.snr * pq.q[i];
        norm2 += f[i] * f[i];
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& x : f) x *= inv;
    }
    out.queries.push_back(std::move(pq));
  }

  out.data.reserve(n * d);
  for (const auto& f : frames) {
    for (double x : f) out.data.push_back(static_cast<float>(x));
  }
  return out;
}

// In-span mean score must exceed every out-of-span frame score.
bool separable(const VideoDraw& draw, std::size_t dim) {
  const std::size_t n = draw.data.size() / dim;
  for (const auto& pq : draw.queries) {
    double in_sum = 0.0;
    double out_max = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      double a = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        a += static_cast<double>(draw.data[j * dim + i]) * pq.q[i];
      }
      const auto jj = static_cast<std::int64_t>(j);
      if (jj >= pq.span.begin && jj < pq.span.end) {
        in_sum += a;
      } else {
        out_max = std::max(out_max, a);
      }
    }
    if (!(in_sum / static_cast<double>(pq.span.length()) > out_max)) {
      return false;
    }
  }
  return true;
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.num_videos == 0 || cfg.queries_per_video == 0 ||
      cfg.video_length == 0 || cfg.dim == 0) {
    fail(ErrorKind::kConfig, "videos, queries, video length and dim must be >= 1");
  }
  if (!(cfg.snr > 0.0) || !std::isfinite(cfg.snr)) {
    fail(ErrorKind::kConfig, "snr must be positive");
  }
  if (cfg.gt_min == 0 || cfg.gt_min > cfg.gt_max) {
    fail(ErrorKind::kConfig, "ground-truth length range must satisfy "
                             "1 <= gt-min <= gt-max");
  }
  if (cfg.gt_max > cfg.video_length) {
    fail(ErrorKind::kConfig, "gt-max (" + std::to_string(cfg.gt_max) +
                                 ") exceeds the video length (" +
                                 std::to_string(cfg.video_length) + ")");
  }
  if (!(cfg.feature_hz > 0.0) || !std::isfinite(cfg.feature_hz)) {
    fail(ErrorKind::kConfig, "feature rate must be positive");
  }
  if (cfg.snap_stride < 0) fail(ErrorKind::kConfig, "negative snap stride");
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
  validate(cfg);
  SynthCorpus corpus;
  for (std::size_t v = 0; v < cfg.num_videos; ++v) {
    VideoDraw draw;
    bool ok = false;
    for (std::size_t attempt = 0; attempt < kMaxVideoAttempts; ++attempt) {
      Rng rng(cfg.seed ^ static_cast<std::uint64_t>(v) ^
              (static_cast<std::uint64_t>(attempt) << 32));
      draw = draw_video(cfg, rng);
      if (separable(draw, cfg.dim)) {
        ok = true;
        break;
      }
      ++corpus.regenerations;
    }
    if (!ok) {
      fail(ErrorKind::kData, "could not draw a separable video at snr " +
                                 std::to_string(cfg.snr));
    }
    const std::string vid = video_name(v);
    for (std::size_t k = 0; k < draw.queries.size(); ++k) {
      char qid[48];
      std::snprintf(qid, sizeof(qid), "%s_q%02zu", vid.c_str(), k);
      QueryFeatures q;
      q.query_id = qid;
      q.video_id = vid;
      q.text = "synthetic query " + std::to_string(k) + " of " + vid;
      q.cls = draw.queries[k].q;
      corpus.annotations.push_back(
          {q.query_id, vid,
           frames_to_seconds(draw.queries[k].span, cfg.feature_hz)});
      corpus.planted.push_back(draw.queries[k].span);
      corpus.queries.push_back(std::move(q));
    }
    corpus.videos.emplace_back(vid, cfg.dim, cfg.video_length, cfg.feature_hz,
                               std::move(draw.data));
  }
  return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "features", ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + (dir / "features").string());
  for (const auto& vf : corpus.videos) {
    save_video_features(vf, dir / "features" / (vf.video_id() + ".conef"));
  }
  save_queries(corpus.queries, dir / "queries.jsonl");
  save_annotations(corpus.annotations, dir / "annotations.jsonl");
}

GroundedSpan brute_force_ground(const VideoFeatures& vf, const QueryFeatures& q,
                                const AnchorConfig& anchors) {
  validate(anchors);
  check_pairing(vf, q);
  if (vf.count() > kBruteForceMaxFrames) {
    fail(ErrorKind::kConfig, "brute force refuses videos longer than " +
                                 std::to_string(kBruteForceMaxFrames) +
                                 " frames");
  }
  const auto n = static_cast<std::int64_t>(vf.count());
  std::vector<double> a(vf.count());
  for (std::size_t j = 0; j < vf.count(); ++j) {
    double acc = 0.0;
    const auto row = vf.row(j);
    for (std::size_t k = 0; k < vf.dim(); ++k) {
      acc += static_cast<double>(row[k]) * q.cls[k];
    }
    a[j] = acc;
  }

  GroundedSpan best{{0, 0}, -INFINITY};
  for (std::int64_t b = 0; b < n; b += anchors.stride) {
    for (std::int64_t len : anchors.lengths) {
      if (b + len > n) break;
      double sum = 0.0;
      for (std::int64_t t = b; t < b + len; ++t) sum += a[t];
      const double mean = sum / static_cast<double>(len);
      if (mean > best.score) best = {{b, b + len}, mean};
    }
  }
  if (best.span.length() == 0) {
    fail(ErrorKind::kValidation, "no anchor fits a video of " +
                                     std::to_string(n) + " frames");
  }
  return best;
}

}  // namespace winground
