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

#include "winground/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "winground/error.hpp"

namespace winground {
namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_span(TimeSpan s, const char* what) {
  if (!(s.start < s.end)) {
    fail(ErrorKind::kValidation, std::string(what) + " span is degenerate");
  }
}

}  // namespace

PairLoss proposal_loss(double p_pos, double p_neg) {
  const double diff = p_neg - p_pos;
  const double s = sigmoid(diff);
  return {softplus(diff), -s, s};
}

FrameLoss frame_loss(std::span<const double> sal_pos,
                     std::span<const double> sal_neg, double delta) {
  if (sal_pos.empty() || sal_neg.empty()) {
    fail(ErrorKind::kValidation, "frame loss needs non-empty saliency lists");
  }
  const double mean =
      std::accumulate(sal_pos.begin(), sal_pos.end(), 0.0) /
      static_cast<double>(sal_pos.size());
  const auto argmax = std::max_element(sal_neg.begin(), sal_neg.end());
  const double gap = mean - *argmax;

  FrameLoss out;
  out.d_sal_pos.assign(sal_pos.size(), 0.0);
  out.d_sal_neg.assign(sal_neg.size(), 0.0);
  if (gap >= delta) return out;

  out.value = delta - gap;
  const double share = -1.0 / static_cast<double>(sal_pos.size());
  std::fill(out.d_sal_pos.begin(), out.d_sal_pos.end(), share);
  out.d_sal_neg[static_cast<std::size_t>(argmax - sal_neg.begin())] = 1.0;
  return out;
}

double combined_contrastive(const ContrastivePair& pair) {
  return proposal_loss(pair.p_pos, pair.p_neg).value +
         frame_loss(pair.sal_pos, pair.sal_neg, pair.delta).value;
}

SpanLoss span_l1_loss(TimeSpan pred, TimeSpan gt, double window_len) {
  if (!(window_len > 0.0)) {
    fail(ErrorKind::kValidation, "window length must be positive");
  }
  const double ds = (pred.start - gt.start) / window_len;
  const double de = (pred.end - gt.end) / window_len;
  return {std::abs(ds) + std::abs(de), sign_or_zero(ds) / window_len,
          sign_or_zero(de) / window_len};
}

SpanLoss span_iou_loss(TimeSpan pred, TimeSpan gt) {
  require_span(pred, "predicted");
  require_span(gt, "ground-truth");
  const double lo = std::max(pred.start, gt.start);
  const double hi = std::min(pred.end, gt.end);
  const double inter = std::max(0.0, hi - lo);
  if (inter <= 0.0) return {1.0, 0.0, 0.0};
  const double uni = pred.length() + gt.length() - inter;

  // Derivatives of the intersection; equal endpoints take the zero branch.
  const double di_ds = pred.start > gt.start ? -1.0 : 0.0;
  const double di_de = pred.end < gt.end ? 1.0 : 0.0;
  const double du_ds = -1.0 - di_ds;
  const double du_de = 1.0 - di_de;
  const double u2 = uni * uni;
  return {1.0 - inter / uni, -(di_ds * uni - inter * du_ds) / u2,
          -(di_de * uni - inter * du_de) / u2};
}

double check_gradient(const DifferentiableFn& f, std::span<const double> x,
                      double h, double floor) {
  std::vector<double> analytic(x.size(), 0.0);
  f(x, analytic);
  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe, {});
    probe[i] = x[i] - h;
    const double down = f(probe, {});
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * h);
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

}  // namespace winground
