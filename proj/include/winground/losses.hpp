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

#ifndef WINGROUND_LOSSES_HPP_
#define WINGROUND_LOSSES_HPP_

#include <functional>
#include <span>
#include <vector>

#include "winground/spans.hpp"

namespace winground {

inline constexpr double kDefaultMargin = 0.2;

// Loss value with the gradient with respect to each scalar input.
struct PairLoss {
  double value = 0.0;
  double d_pos = 0.0;
  double d_neg = 0.0;
};

struct FrameLoss {
  double value = 0.0;
  std::vector<double> d_sal_pos;
  std::vector<double> d_sal_neg;
};

// Gradient is taken with respect to the predicted span.
struct SpanLoss {
  double value = 0.0;
  double d_start = 0.0;
  double d_end = 0.0;
};

struct ContrastivePair {
  double p_pos = 0.0;
  double p_neg = 0.0;
  std::vector<double> sal_pos;
  std::vector<double> sal_neg;
  double delta = kDefaultMargin;
};

// -log(e^p+ / (e^p+ + e^p-)), evaluated as softplus(p- - p+).
PairLoss proposal_loss(double p_pos, double p_neg);

// max(0, delta + max(sal_neg) - mean(sal_pos)). The loss is exactly zero
// iff mean(sal_pos) - max(sal_neg) >= delta. At the hinge kink the gradient
// is zero; among tied maxima of sal_neg the lowest index takes the gradient.
FrameLoss frame_loss(std::span<const double> sal_pos,
                     std::span<const double> sal_neg, double delta);

double combined_contrastive(const ContrastivePair& pair);

// |s - s_gt| + |e - e_gt| after dividing both spans by window_len.
SpanLoss span_l1_loss(TimeSpan pred, TimeSpan gt, double window_len);

// 1 - IoU(pred, gt). Zero gradient when the spans are disjoint.
SpanLoss span_iou_loss(TimeSpan pred, TimeSpan gt);

// f(x, grad) returns the value at x and, when grad is non-empty, writes the
// analytic gradient into it.
using DifferentiableFn =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

// Largest elementwise |analytic - numeric| / max(|analytic|, |numeric|, floor)
// where the numeric gradient is a central difference with step h. The floor
// keeps components that are analytically zero from dividing by zero.
double check_gradient(const DifferentiableFn& f, std::span<const double> x,
                      double h, double floor = 1e-3);

}  // namespace winground

#endif  // WINGROUND_LOSSES_HPP_
