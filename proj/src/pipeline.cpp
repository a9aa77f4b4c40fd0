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

#include "winground/pipeline.hpp"

#include <map>
#include <thread>

#include "winground/error.hpp"

namespace winground {

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["window_length"] = localize.window_length;
  j["topk"] = localize.topk;
  j["nms_iou"] = localize.nms_iou;
  j["margin"] = margin;
  j["anchor_lengths"] = localize.anchors.lengths;
  j["anchor_stride"] = localize.anchors.stride;
  j["max_keep"] = localize.max_keep;
  j["seed"] = seed;
  j["adapter"] = adapter_path ? nlohmann::ordered_json(*adapter_path)
                              : nlohmann::ordered_json(nullptr);
  j["proposals_from"] = proposals_path
                            ? nlohmann::ordered_json(*proposals_path)
                            : nlohmann::ordered_json(nullptr);
  j["normalization"] = localize.per_window_norm ? "per-window" : "per-query";
  j["cosine"] = cosine;
  return j;
}

GroundingRun ground_all(std::span<const QueryFeatures> queries,
                        const VideoStore& store, const AdapterParams& params,
                        const LocalizeConfig& config,
                        const std::vector<Proposal>* external,
                        std::size_t threads) {
  validate(config);
  GroundingRun run;
  run.results.resize(queries.size());
  // Resolve videos up front so a missing video fails before any work starts.
  std::vector<const VideoFeatures*> videos;
  videos.reserve(queries.size());
  for (const auto& q : queries) videos.push_back(&store.at(q.video_id));

  threads = std::max<std::size_t>(1, std::min(threads, queries.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      run.results[i] = localize(queries[i], *videos[i], params, config, external);
    }
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < queries.size(); i += threads) {
            run.results[i] =
                localize(queries[i], *videos[i], params, config, external);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (const auto& r : run.results) {
    run.efficiency.windows_total += r.windows_total;
    run.efficiency.windows_scored += r.selected.size();
  }
  return run;
}

PredictionSet to_prediction_set(const GroundingRun& run,
                                const nlohmann::ordered_json& run_config) {
  PredictionSet set;
  set.run_config = run_config;
  set.efficiency = run.efficiency;
  for (const auto& r : run.results) {
    auto& list = set.by_query[r.query_id];
    for (const auto& p : r.predictions) list.push_back({p.span_seconds, p.r});
  }
  return set;
}

bool gt_window_retained(const GroundingResult& result, const VideoFeatures& vf,
                        std::int64_t window_length, TimeSpan gt) {
  const auto frames = static_cast<std::int64_t>(vf.count());
  const FrameSpan span = seconds_to_frames(gt, vf.feature_hz(), frames);
  const auto windows = slice_windows(frames, window_length);
  for (const auto& s : result.selected) {
    if (windows[s.window_index].span().contains(span)) return true;
  }
  return false;
}

std::vector<TrainingExample> make_training_examples(
    const VideoStore& store, std::span<const QueryFeatures> queries,
    std::span<const Annotation> anns) {
  std::map<std::string, const QueryFeatures*> by_id;
  for (const auto& q : queries) by_id[q.query_id] = &q;
  std::vector<TrainingExample> out;
  out.reserve(anns.size());
  for (const auto& a : anns) {
    auto it = by_id.find(a.query_id);
    if (it == by_id.end()) {
      fail(ErrorKind::kPairing, "annotation '" + a.query_id +
                                    "' has no query features");
    }
    const VideoFeatures& vf = store.at(a.video_id);
    check_pairing(vf, *it->second);
    out.push_back({&vf,
                   seconds_to_frames(a.gt, vf.feature_hz(),
                                     static_cast<std::int64_t>(vf.count())),
                   it->second->cls});
  }
  return out;
}

AdapterParams identity_adapter(std::size_t dim) {
  return init_adapter(dim, std::max<std::size_t>(1, dim / 2), 0);
}

}  // namespace winground
