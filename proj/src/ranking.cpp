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

#include "winground/ranking.hpp"

#include <algorithm>
#include <map>

#include "winground/error.hpp"
#include "winground/evaluation.hpp"

namespace winground {
namespace {

// Adapted frames for a contiguous global frame range, one column per frame.
struct AdaptedRange {
  std::int64_t begin = 0;
  Eigen::MatrixXd frames;

  const double* column(std::int64_t global_frame) const {
    return frames.col(global_frame - begin).data();
  }
};

double seq_dot(const double* h, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) acc += h[k] * q[k];
  return acc;
}

AdaptedRange adapt_range(const AdapterParams& params, const VideoFeatures& vf,
                         FrameSpan range) {
  return {range.begin, adapt_frames(params, vf, range)};
}

FrameSpan bounding_range(std::span<const Proposal> proposals) {
  FrameSpan r{proposals.front().span_frames.begin,
              proposals.front().span_frames.end};
  for (const auto& p : proposals) {
    r.begin = std::min(r.begin, p.span_frames.begin);
    r.end = std::max(r.end, p.span_frames.end);
  }
  return r;
}

std::vector<double> matching_from(const AdaptedRange& adapted,
                                  std::span<const double> q,
                                  std::span<const Proposal> proposals) {
  const auto dim = adapted.frames.rows();
  std::vector<double> out;
  out.reserve(proposals.size());
  std::vector<double> h(static_cast<std::size_t>(dim));
  for (const auto& p : proposals) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::int64_t t = p.span_frames.begin; t < p.span_frames.end; ++t) {
      const double* col = adapted.column(t);
      for (Eigen::Index k = 0; k < dim; ++k) h[k] += col[k];
    }
    const double n = static_cast<double>(p.span_frames.length());
    for (double& x : h) x /= n;
    out.push_back(seq_dot(h.data(), q));
  }
  return out;
}

void check_params(const AdapterParams& params, const VideoFeatures& vf) {
  if (params.dim() != vf.dim()) {
    fail(ErrorKind::kShape, "adapter dim " + std::to_string(params.dim()) +
                                " does not match video dim " +
                                std::to_string(vf.dim()));
  }
}

}  // namespace

std::vector<double> matching_scores(const AdapterParams& params,
                                    const VideoFeatures& vf,
                                    const QueryFeatures& q,
                                    std::span<const Proposal> proposals) {
  check_pairing(vf, q);
  check_params(params, vf);
  if (proposals.empty()) return {};
  const AdaptedRange adapted =
      adapt_range(params, vf, bounding_range(proposals));
  return matching_from(adapted, q.cls, proposals);
}

std::vector<double> min_max_normalize(std::span<const double> xs) {
  if (xs.empty()) fail(ErrorKind::kValidation, "cannot normalize empty list");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double mn = *lo;
  const double range = *hi - mn;
  std::vector<double> out(xs.size(), 0.5);
  if (range > 0.0) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - mn) / range;
  }
  return out;
}

std::vector<double> fuse(std::span<const double> p_norm,
                         std::span<const double> m_norm) {
  if (p_norm.size() != m_norm.size()) {
    fail(ErrorKind::kShape, "score lists differ in length");
  }
  std::vector<double> r(p_norm.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p_norm[i] + m_norm[i];
  return r;
}

bool ranks_before(const RankedPrediction& a, const RankedPrediction& b) {
  if (a.r != b.r) return a.r > b.r;
  if (a.span_seconds.start != b.span_seconds.start) {
    return a.span_seconds.start < b.span_seconds.start;
  }
  return a.span_seconds.length() < b.span_seconds.length();
}

std::vector<RankedPrediction> nms(std::vector<RankedPrediction> preds,
                                  double iou_threshold, std::size_t max_keep) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    fail(ErrorKind::kConfig, "NMS threshold must lie in (0, 1]");
  }
  std::stable_sort(preds.begin(), preds.end(), ranks_before);
  std::vector<char> suppressed(preds.size(), 0);
  std::vector<RankedPrediction> kept;
  for (std::size_t i = 0; i < preds.size() && kept.size() < max_keep; ++i) {
    if (suppressed[i]) continue;
    kept.push_back(preds[i]);
    for (std::size_t j = i + 1; j < preds.size(); ++j) {
      if (!suppressed[j] &&
          temporal_iou(preds[i].span_seconds, preds[j].span_seconds) >=
              iou_threshold) {
        suppressed[j] = 1;
      }
    }
  }
  return kept;
}

void validate(const LocalizeConfig& config) {
  if (config.window_length <= 0 || config.window_length % 2 != 0) {
    fail(ErrorKind::kConfig, "window length must be a positive even number");
  }
  if (config.topk == 0) fail(ErrorKind::kConfig, "top-k must be >= 1");
  if (config.max_keep == 0) fail(ErrorKind::kConfig, "max-keep must be >= 1");
  if (!(config.nms_iou > 0.0 && config.nms_iou <= 1.0)) {
    fail(ErrorKind::kConfig, "NMS threshold must lie in (0, 1]");
  }
  validate(config.anchors);
}

GroundingResult localize(const QueryFeatures& q, const VideoFeatures& vf,
                         const AdapterParams& params,
                         const LocalizeConfig& config,
                         const std::vector<Proposal>* external) {
  validate(config);
  check_pairing(vf, q);
  check_params(params, vf);

  GroundingResult result;
  result.query_id = q.query_id;
  const auto windows =
      slice_windows(static_cast<std::int64_t>(vf.count()), config.window_length);
  result.windows_total = windows.size();
  const auto scores = frame_scores(vf, q);
  result.selected =
      select_top_k(window_scores(scores, windows), config.topk);

  std::vector<std::int64_t> kept;
  for (const auto& s : result.selected) kept.push_back(s.window_index);
  std::sort(kept.begin(), kept.end());

  FrameSpan range{windows[kept.front()].start, windows[kept.front()].start};
  for (auto i : kept) {
    range.begin = std::min(range.begin, windows[i].start);
    range.end = std::max(range.end, windows[i].start + windows[i].length);
  }
  const AdaptedRange adapted = adapt_range(params, vf, range);

  std::vector<Proposal> proposals;
  if (external != nullptr) {
    for (const auto& p : *external) {
      if (p.query_id == q.query_id &&
          std::binary_search(kept.begin(), kept.end(), p.window_index)) {
        proposals.push_back(p);
      }
    }
  } else {
    std::vector<double> saliency;
    for (auto i : kept) {
      const Window& w = windows[i];
      saliency.resize(w.length);
      for (std::int64_t t = 0; t < w.length; ++t) {
        saliency[t] = seq_dot(adapted.column(w.start + t), q.cls);
      }
      auto props = generate_anchor_proposals(
          q.query_id, w, saliency, config.anchors, vf.feature_hz(),
          lattice_offset(w, config.anchors.stride));
      std::move(props.begin(), props.end(), std::back_inserter(proposals));
    }
  }
  result.proposal_count = proposals.size();
  if (proposals.empty()) return result;

  const std::vector<double> m = matching_from(adapted, q.cls, proposals);
  std::vector<double> p(proposals.size());
  for (std::size_t j = 0; j < proposals.size(); ++j) p[j] = proposals[j].p;

  std::vector<double> p_norm(p.size());
  std::vector<double> m_norm(m.size());
  if (config.per_window_norm) {
    std::map<std::int64_t, std::vector<std::size_t>> groups;
    for (std::size_t j = 0; j < proposals.size(); ++j) {
      groups[proposals[j].window_index].push_back(j);
    }
    for (const auto& [window, members] : groups) {
      std::vector<double> gp;
      std::vector<double> gm;
      for (auto j : members) {
        gp.push_back(p[j]);
        gm.push_back(m[j]);
      }
      const auto np = min_max_normalize(gp);
      const auto nm = min_max_normalize(gm);
      for (std::size_t k = 0; k < members.size(); ++k) {
        p_norm[members[k]] = np[k];
        m_norm[members[k]] = nm[k];
      }
    }
  } else {
    p_norm = min_max_normalize(p);
    m_norm = min_max_normalize(m);
  }
  const std::vector<double> r = fuse(p_norm, m_norm);

  std::vector<RankedPrediction> ranked;
  ranked.reserve(proposals.size());
  for (std::size_t j = 0; j < proposals.size(); ++j) {
    ranked.push_back({q.query_id, proposals[j].window_index,
                      proposals[j].span_frames, proposals[j].span_seconds, r[j],
                      p_norm[j], m_norm[j]});
  }
  result.predictions = nms(std::move(ranked), config.nms_iou, config.max_keep);
  return result;
}

WindowResolver make_window_resolver(const VideoStore& store,
                                    std::span<const QueryFeatures> queries,
                                    std::int64_t window_length) {
  auto table = std::make_shared<
      std::map<std::string, std::pair<std::vector<Window>, double>>>();
  for (const auto& q : queries) {
    const VideoFeatures* vf = store.find(q.video_id);
    if (vf == nullptr) continue;
    (*table)[q.query_id] = {
        slice_windows(static_cast<std::int64_t>(vf->count()), window_length),
        vf->feature_hz()};
  }
  return [table](const std::string& query_id,
                 std::int64_t window_index) -> std::optional<WindowRef> {
    auto it = table->find(query_id);
    if (it == table->end()) return std::nullopt;
    const auto& windows = it->second.first;
    if (window_index < 0 ||
        window_index >= static_cast<std::int64_t>(windows.size())) {
      return std::nullopt;
    }
    return WindowRef{windows[window_index], it->second.second};
  };
}

}  // namespace winground
