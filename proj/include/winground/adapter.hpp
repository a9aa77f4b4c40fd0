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

#ifndef WINGROUND_ADAPTER_HPP_
#define WINGROUND_ADAPTER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "winground/feature_store.hpp"
#include "winground/spans.hpp"

namespace winground {

// Residual bottleneck: v_hat = w2 * relu(w1 * v + b1) + b2 + v.
struct AdapterParams {
  Eigen::MatrixXd w1;  // hidden x dim
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // dim x hidden
  Eigen::VectorXd b2;  // dim
  double temperature = 1.0;

  std::size_t dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.rows()); }
  bool is_identity() const { return w2.isZero(0.0) && b2.isZero(0.0); }

  friend bool operator==(const AdapterParams& a, const AdapterParams& b);
};

// Gradient buffers with the same shapes as AdapterParams.
struct AdapterGrad {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  static AdapterGrad zeros_like(const AdapterParams& params);
};

// w1, b1 ~ U(-1/sqrt(dim), 1/sqrt(dim)); w2 and b2 are zero so the fresh
// adapter is the identity map.
AdapterParams init_adapter(std::size_t dim, std::size_t hidden,
                           std::uint64_t seed, double temperature = 1.0);

void validate(const AdapterParams& params);

Eigen::VectorXd adapt_frame(const AdapterParams& params,
                            const Eigen::VectorXd& v);
Eigen::VectorXd adapt_frame(const AdapterParams& params,
                            std::span<const float> v);

// Adapted frames of `span` as the columns of a dim x length matrix.
Eigen::MatrixXd adapt_frames(const AdapterParams& params,
                             const VideoFeatures& vf, FrameSpan span);

struct ProposalFeature {
  Eigen::VectorXd h;
};

// Mean of the adapted frames over the half-open span.
ProposalFeature proposal_feature(const AdapterParams& params,
                                 const VideoFeatures& vf, FrameSpan span);

struct NceResult {
  double value = 0.0;
  std::vector<Eigen::VectorXd> d_features;  // dL/dh_j
};

// -log softmax_j(h_j . q / temperature) at j = pos_index.
NceResult nce_loss(std::span<const ProposalFeature> features,
                   std::size_t pos_index, std::span<const double> q_cls,
                   double temperature = 1.0);

// One positive per query: the query's ground-truth span in its video.
struct TrainingExample {
  const VideoFeatures* video = nullptr;
  FrameSpan span;
  std::vector<double> q_cls;
};

struct BatchLoss {
  double value = 0.0;  // summed over the batch's positives
  AdapterGrad grad;
};

// In-batch NCE: example i's positive is its own proposal feature and the
// other members of the batch are its negatives. Gradients are backpropagated
// through the mean pool and the residual FFN.
BatchLoss nce_batch_loss(const AdapterParams& params,
                         std::span<const TrainingExample> batch);

struct TrainConfig {
  std::size_t epochs = 30;
  double lr = 1e-5;
  std::size_t batch = 32;
  std::size_t hidden = 0;  // 0 selects dim / 2
  double temperature = 1.0;
  std::uint64_t seed = 42;
};

struct TrainResult {
  AdapterParams params;
  std::vector<double> epoch_loss;  // mean NCE loss per example, per epoch
};

// Plain SGD over shuffled mini-batches. Deterministic for a given seed.
TrainResult train_adapter(std::span<const TrainingExample> examples,
                          const TrainConfig& config);

// Weight file: flat JSON map {dim, hidden, w1, b1, w2, b2, temperature} with
// row-major arrays. Entries of `extra` (e.g. the resolved run config) are
// written after the weights.
void save_adapter(const AdapterParams& params, const std::filesystem::path& path,
                  const nlohmann::ordered_json& extra = {});
AdapterParams load_adapter(const std::filesystem::path& path);

}  // namespace winground

#endif  // WINGROUND_ADAPTER_HPP_
