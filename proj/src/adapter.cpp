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

#include "winground/adapter.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "winground/error.hpp"
#include "winground/random.hpp"

namespace winground {
namespace {

double seq_dot(const Eigen::VectorXd& h, std::span<const double> q) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < h.size(); ++k) acc += h[k] * q[k];
  return acc;
}

void check_dim(const AdapterParams& params, std::size_t dim) {
  if (params.dim() != dim) {
    fail(ErrorKind::kShape, "adapter has dim " + std::to_string(params.dim()) +
                                ", input has dim " + std::to_string(dim));
  }
}

void check_span(const VideoFeatures& vf, FrameSpan span) {
  if (span.begin < 0 || span.begin >= span.end ||
      static_cast<std::size_t>(span.end) > vf.count()) {
    fail(ErrorKind::kValidation,
         "span [" + std::to_string(span.begin) + ", " +
             std::to_string(span.end) + ") invalid for video '" +
             vf.video_id() + "' of " + std::to_string(vf.count()) + " frames");
  }
}

Eigen::MatrixXd frames_matrix(const VideoFeatures& vf, FrameSpan span) {
  Eigen::MatrixXd v(vf.dim(), span.length());
  for (std::int64_t t = 0; t < span.length(); ++t) {
    const auto row = vf.row(static_cast<std::size_t>(span.begin + t));
    for (std::size_t k = 0; k < vf.dim(); ++k) v(k, t) = row[k];
  }
  return v;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Eigen::MatrixXd unflatten(const nlohmann::json& j, std::size_t rows,
                          std::size_t cols, const char* key) {
  if (!j.is_array() || j.size() != rows * cols) {
    fail(ErrorKind::kShape, std::string("adapter '") + key + "' must hold " +
                                std::to_string(rows * cols) + " values");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = j[r * cols + c].get<double>();
    }
  }
  return m;
}

}  // namespace

bool operator==(const AdapterParams& a, const AdapterParams& b) {
  const auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.w1, b.w1) && same(a.b1, b.b1) && same(a.w2, b.w2) &&
         same(a.b2, b.b2) && a.temperature == b.temperature;
}

AdapterGrad AdapterGrad::zeros_like(const AdapterParams& params) {
  return {Eigen::MatrixXd::Zero(params.w1.rows(), params.w1.cols()),
          Eigen::VectorXd::Zero(params.b1.size()),
          Eigen::MatrixXd::Zero(params.w2.rows(), params.w2.cols()),
          Eigen::VectorXd::Zero(params.b2.size())};
}

AdapterParams init_adapter(std::size_t dim, std::size_t hidden,
                           std::uint64_t seed, double temperature) {
  if (dim == 0 || hidden == 0) {
    fail(ErrorKind::kConfig, "adapter dim and hidden must be >= 1");
  }
  if (!(temperature > 0.0)) {
    fail(ErrorKind::kConfig, "temperature must be positive");
  }
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  AdapterParams p;
  p.w1.resize(hidden, dim);
  for (Eigen::Index r = 0; r < p.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.w1.cols(); ++c) {
      p.w1(r, c) = rng.uniform(-bound, bound);
    }
  }
  p.b1.resize(hidden);
  for (Eigen::Index r = 0; r < p.b1.size(); ++r) {
    p.b1[r] = rng.uniform(-bound, bound);
  }
  p.w2 = Eigen::MatrixXd::Zero(dim, hidden);
  p.b2 = Eigen::VectorXd::Zero(dim);
  p.temperature = temperature;
  return p;
}

void validate(const AdapterParams& p) {
  const auto d = p.w1.cols();
  const auto h = p.w1.rows();
  if (d == 0 || h == 0 || p.b1.size() != h || p.w2.rows() != d ||
      p.w2.cols() != h || p.b2.size() != d) {
    fail(ErrorKind::kShape, "inconsistent adapter shapes");
  }
  if (!p.w1.allFinite() || !p.b1.allFinite() || !p.w2.allFinite() ||
      !p.b2.allFinite() || !std::isfinite(p.temperature) ||
      p.temperature <= 0.0) {
    fail(ErrorKind::kData, "adapter holds non-finite values");
  }
}

Eigen::VectorXd adapt_frame(const AdapterParams& params,
                            const Eigen::VectorXd& v) {
  check_dim(params, static_cast<std::size_t>(v.size()));
  const Eigen::VectorXd r = (params.w1 * v + params.b1).cwiseMax(0.0);
  return params.w2 * r + params.b2 + v;
}

Eigen::VectorXd adapt_frame(const AdapterParams& params,
                            std::span<const float> v) {
  Eigen::VectorXd x(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) x[k] = v[k];
  return adapt_frame(params, x);
}

Eigen::MatrixXd adapt_frames(const AdapterParams& params,
                             const VideoFeatures& vf, FrameSpan span) {
  check_dim(params, vf.dim());
  check_span(vf, span);
  const Eigen::MatrixXd v = frames_matrix(vf, span);
  if (params.is_identity()) return v;
  const Eigen::MatrixXd r =
      ((params.w1 * v).colwise() + params.b1).cwiseMax(0.0);
  return ((params.w2 * r).colwise() + params.b2) + v;
}

ProposalFeature proposal_feature(const AdapterParams& params,
                                 const VideoFeatures& vf, FrameSpan span) {
  const Eigen::MatrixXd adapted = adapt_frames(params, vf, span);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(adapted.rows());
  for (Eigen::Index t = 0; t < adapted.cols(); ++t) h += adapted.col(t);
  h /= static_cast<double>(adapted.cols());
  return {std::move(h)};
}

NceResult nce_loss(std::span<const ProposalFeature> features,
                   std::size_t pos_index, std::span<const double> q_cls,
                   double temperature) {
  if (features.empty() || pos_index >= features.size()) {
    fail(ErrorKind::kValidation, "NCE needs a positive inside the batch");
  }
  std::vector<double> logits(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (static_cast<std::size_t>(features[j].h.size()) != q_cls.size()) {
      fail(ErrorKind::kShape, "proposal feature and query differ in dim");
    }
    logits[j] = seq_dot(features[j].h, q_cls) / temperature;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  const double lse = mx + std::log(z);

  NceResult out;
  out.value = lse - logits[pos_index];
  Eigen::Map<const Eigen::VectorXd> q(q_cls.data(),
                                      static_cast<Eigen::Index>(q_cls.size()));
  out.d_features.reserve(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double prob = std::exp(logits[j] - lse);
    const double coeff = (prob - (j == pos_index ? 1.0 : 0.0)) / temperature;
    out.d_features.emplace_back(coeff * q);
  }
  return out;
}

BatchLoss nce_batch_loss(const AdapterParams& params,
                         std::span<const TrainingExample> batch) {
  validate(params);
  const std::size_t n = batch.size();
  BatchLoss out{0.0, AdapterGrad::zeros_like(params)};
  if (n == 0) return out;

  // Forward: keep per-frame activations for the backward pass.
  std::vector<Eigen::MatrixXd> inputs(n);
  std::vector<Eigen::MatrixXd> pre(n);
  std::vector<ProposalFeature> feats(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& ex = batch[j];
    check_dim(params, ex.video->dim());
    check_span(*ex.video, ex.span);
    inputs[j] = frames_matrix(*ex.video, ex.span);
    pre[j] = (params.w1 * inputs[j]).colwise() + params.b1;
    const Eigen::MatrixXd adapted =
        ((params.w2 * pre[j].cwiseMax(0.0)).colwise() + params.b2) + inputs[j];
    feats[j].h = adapted.rowwise().mean();
  }

  std::vector<Eigen::VectorXd> d_h(n, Eigen::VectorXd::Zero(params.dim()));
  for (std::size_t i = 0; i < n; ++i) {
    const NceResult r = nce_loss(feats, i, batch[i].q_cls, params.temperature);
    out.value += r.value;
    for (std::size_t j = 0; j < n; ++j) d_h[j] += r.d_features[j];
  }

  // Backward through mean pool and the residual FFN. The residual path has
  // no parameters, so only the branch contributes to the weight gradients.
  for (std::size_t j = 0; j < n; ++j) {
    const auto frames = inputs[j].cols();
    const Eigen::VectorXd g = d_h[j] / static_cast<double>(frames);
    const Eigen::MatrixXd relu = pre[j].cwiseMax(0.0);
    out.grad.w2 += g * relu.rowwise().sum().transpose();
    out.grad.b2 += g * static_cast<double>(frames);
    const Eigen::VectorXd d_relu = params.w2.transpose() * g;
    for (Eigen::Index t = 0; t < frames; ++t) {
      const Eigen::VectorXd d_pre =
          (pre[j].col(t).array() > 0.0).cast<double>() * d_relu.array();
      out.grad.w1 += d_pre * inputs[j].col(t).transpose();
      out.grad.b1 += d_pre;
    }
  }
  return out;
}

TrainResult train_adapter(std::span<const TrainingExample> examples,
                          const TrainConfig& config) {
  if (examples.empty()) fail(ErrorKind::kConfig, "no training examples");
  if (config.batch == 0) fail(ErrorKind::kConfig, "batch size must be >= 1");
  if (!(config.lr > 0.0) || !std::isfinite(config.lr)) {
    fail(ErrorKind::kConfig, "learning rate must be positive");
  }
  const std::size_t dim = examples.front().video->dim();
  for (const auto& ex : examples) {
    if (ex.video == nullptr || ex.video->dim() != dim ||
        ex.q_cls.size() != dim) {
      fail(ErrorKind::kPairing, "training examples disagree on dim");
    }
    check_span(*ex.video, ex.span);
  }
  const std::size_t hidden =
      config.hidden != 0 ? config.hidden : std::max<std::size_t>(1, dim / 2);

  TrainResult result{init_adapter(dim, hidden, config.seed, config.temperature),
                     {}};
  AdapterParams& params = result.params;
  Rng shuffle_rng(config.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<TrainingExample> batch;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t stop = std::min(order.size(), start + config.batch);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(examples[order[i]]);
      }
      const BatchLoss bl = nce_batch_loss(params, batch);
      if (!std::isfinite(bl.value)) {
        std::ostringstream msg;
        msg << "non-finite NCE loss in epoch " << epoch + 1 << ", batch at "
            << start << " (lr=" << config.lr << ", |w2|="
            << params.w2.norm() << ")";
        fail(ErrorKind::kData, msg.str());
      }
      total += bl.value;
      params.w1 -= config.lr * bl.grad.w1;
      params.b1 -= config.lr * bl.grad.b1;
      params.w2 -= config.lr * bl.grad.w2;
      params.b2 -= config.lr * bl.grad.b2;
    }
    result.epoch_loss.push_back(total / static_cast<double>(order.size()));
  }
  return result;
}

void save_adapter(const AdapterParams& params, const std::filesystem::path& path,
                  const nlohmann::ordered_json& extra) {
  validate(params);
  nlohmann::ordered_json j;
  j["dim"] = params.dim();
  j["hidden"] = params.hidden();
  j["w1"] = flatten(params.w1);
  j["b1"] = flatten(params.b1);
  j["w2"] = flatten(params.w2);
  j["b2"] = flatten(params.b2);
  j["temperature"] = params.temperature;
  if (extra.is_object()) {
    for (const auto& [key, value] : extra.items()) j[key] = value;
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  os << j.dump(1) << '\n';
  if (!os) fail(ErrorKind::kIo, "short write to " + path.string());
}

AdapterParams load_adapter(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  AdapterParams p;
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    const auto hidden = j.at("hidden").get<std::size_t>();
    p.w1 = unflatten(j.at("w1"), hidden, dim, "w1");
    p.b1 = unflatten(j.at("b1"), hidden, 1, "b1");
    p.w2 = unflatten(j.at("w2"), dim, hidden, "w2");
    p.b2 = unflatten(j.at("b2"), dim, 1, "b2");
    p.temperature = j.value("temperature", 1.0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  validate(p);
  return p;
}

}  // namespace winground
