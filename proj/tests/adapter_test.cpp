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
#include <numeric>

#include "adapter_fd.hpp"
#include "doctest.h"
#include "test_util.hpp"
#include "winground/random.hpp"

namespace winground {
namespace {

using testing::kind_of;
using testing::make_video;
using testing::TempDir;

AdapterParams scalar_adapter() {
  AdapterParams p;
  p.w1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.b1 = Eigen::VectorXd::Zero(1);
  p.w2 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.b2 = Eigen::VectorXd::Zero(1);
  return p;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Random unit-norm rows.
VideoFeatures random_video(const std::string& id, std::size_t count,
                           std::size_t dim, Rng& rng) {
  std::vector<float> data(count * dim);
  for (std::size_t t = 0; t < count; ++t) {
    double norm = 0.0;
    std::vector<double> row(dim);
    for (auto& x : row) {
      x = rng.normal();
      norm += x * x;
    }
    for (std::size_t k = 0; k < dim; ++k) {
      data[t * dim + k] = static_cast<float>(row[k] / std::sqrt(norm));
    }
  }
  return VideoFeatures(id, dim, count, 1.875, std::move(data));
}

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> q(dim);
  double norm = 0.0;
  for (auto& x : q) {
    x = rng.normal();
    norm += x * x;
  }
  for (auto& x : q) x /= std::sqrt(norm);
  return q;
}

TEST_CASE("fresh adapter is the identity") {
  Rng rng(1);
  const AdapterParams p = init_adapter(6, 3, 17);
  CHECK(p.is_identity());
  CHECK(p.dim() == 6);
  CHECK(p.hidden() == 3);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd v(6);
    for (auto& x : v) x = rng.normal();
    CHECK(adapt_frame(p, v) == v);
  }
  const double bound = 1.0 / std::sqrt(6.0);
  CHECK(p.w1.cwiseAbs().maxCoeff() <= bound);
  CHECK(p.b1.cwiseAbs().maxCoeff() <= bound);
  CHECK(p.w1.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("initialization is seeded") {
  CHECK(init_adapter(8, 4, 5) == init_adapter(8, 4, 5));
  CHECK_FALSE(init_adapter(8, 4, 5) == init_adapter(8, 4, 6));
  CHECK(kind_of([] { init_adapter(0, 4, 1); }) == ErrorKind::kConfig);
  CHECK(kind_of([] { init_adapter(4, 0, 1); }) == ErrorKind::kConfig);
}

TEST_CASE("hand-computed forward passes") {
  const AdapterParams p = scalar_adapter();
  CHECK(adapt_frame(p, vec({2.0}))[0] == 4.0);
  CHECK(adapt_frame(p, vec({-2.0}))[0] == -2.0);
  CHECK(kind_of([&] { adapt_frame(p, vec({1.0, 2.0})); }) == ErrorKind::kShape);
}

TEST_CASE("proposal features are means of adapted frames") {
  const AdapterParams id = init_adapter(2, 1, 3);
  const auto vf = make_video("v", {{1, 0}, {0, 1}, {0.25f, 0.75f}});
  const auto both = proposal_feature(id, vf, {0, 2}).h;
  CHECK(both[0] == 0.5);
  CHECK(both[1] == 0.5);
  CHECK(proposal_feature(id, vf, {2, 3}).h == vec({0.25, 0.75}));
  CHECK(kind_of([&] { proposal_feature(id, vf, {1, 1}); }) ==
        ErrorKind::kValidation);
  CHECK(kind_of([&] { proposal_feature(id, vf, {2, 4}); }) ==
        ErrorKind::kValidation);

  Rng rng(4);
  const AdapterParams p = testing::random_adapter(2, 3, rng);
  const auto flat = make_video("c", {{0.3f, -0.4f}, {0.3f, -0.4f}});
  const Eigen::VectorXd expect = adapt_frame(p, flat.row(0));
  CHECK((proposal_feature(p, flat, {0, 2}).h - expect).norm() < 1e-15);
  CHECK((proposal_feature(p, flat, {1, 2}).h - expect).norm() == 0.0);
}

TEST_CASE("NCE values") {
  const std::vector<double> q{1.0, 0.0};
  std::vector<ProposalFeature> two{{vec({0.4, 1.0})}, {vec({0.4, -3.0})}};
  CHECK(nce_loss(two, 0, q).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  for (std::size_t b : {3u, 7u, 32u}) {
    std::vector<ProposalFeature> same(b, ProposalFeature{vec({0.1, 0.2})});
    CHECK(nce_loss(same, b - 1, q).value ==
          doctest::Approx(std::log(static_cast<double>(b))).epsilon(1e-13));
  }

  std::vector<ProposalFeature> sat{{vec({21.0, 0.0})}, {vec({1.0, 0.0})},
                                   {vec({-5.0, 0.0})}};
  CHECK(nce_loss(sat, 0, q).value < 1e-8);
  CHECK(nce_loss(sat, 0, q, 2.0).value > nce_loss(sat, 0, q).value);
  CHECK(kind_of([&] { nce_loss(sat, 3, q); }) == ErrorKind::kValidation);
}

TEST_CASE("NCE ignores the order of the negatives") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    std::vector<ProposalFeature> fs(n);
    for (auto& f : fs) {
      f.h.resize(4);
      for (auto& x : f.h) x = rng.normal();
    }
    const auto q = random_unit(4, rng);
    const double base = nce_loss(fs, 0, q).value;
    std::vector<ProposalFeature> perm(fs.begin() + 1, fs.end());
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.below(i)]);
    }
    perm.insert(perm.begin(), fs[0]);
    CHECK(nce_loss(perm, 0, q).value == doctest::Approx(base).epsilon(1e-13));
  }
}

TEST_CASE("NCE feature gradient matches finite differences") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    const std::size_t d = 1 + rng.below(4);
    const double tau = rng.uniform(0.5, 2.0);
    const std::size_t pos = rng.below(n);
    const auto q = random_unit(d, rng);
    std::vector<double> x(n * d);
    for (auto& v : x) v = rng.normal();
    const DifferentiableFn f = [&](std::span<const double> in,
                                   std::span<double> g) {
      std::vector<ProposalFeature> fs(n);
      for (std::size_t j = 0; j < n; ++j) {
        fs[j].h = Eigen::Map<const Eigen::VectorXd>(in.data() + j * d,
                                                    static_cast<Eigen::Index>(d));
      }
      const NceResult r = nce_loss(fs, pos, q, tau);
      if (!g.empty()) {
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t k = 0; k < d; ++k) g[j * d + k] = r.d_features[j][k];
        }
      }
      return r.value;
    };
    CHECK(check_gradient(f, x, 1e-6) < 1e-4);
  }
}

TEST_CASE("batch NCE gradient through the adapter matches finite differences") {
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t dim = 2 + rng.below(4);
    const std::size_t hidden = 1 + rng.below(4);
    std::vector<VideoFeatures> videos;
    for (int v = 0; v < 2; ++v) {
      videos.push_back(random_video("v" + std::to_string(v), 12, dim, rng));
    }
    std::vector<TrainingExample> batch;
    for (std::size_t i = 0, n = 1 + rng.below(4); i < n; ++i) {
      const auto b = static_cast<std::int64_t>(rng.below(10));
      batch.push_back({&videos[rng.below(2)],
                       {b, b + 1 + static_cast<std::int64_t>(rng.below(12 - b))},
                       random_unit(dim, rng)});
    }
    const AdapterParams p =
        testing::random_adapter(dim, hidden, rng, rng.uniform(0.5, 2.0));
    if (testing::relu_margin(p, batch) < 1e-4) continue;
    const auto x = testing::pack(p);
    CHECK(check_gradient(testing::batch_loss_fn(p, batch), x, 1e-6) < 1e-4);
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("identity adapter still receives output-layer gradient") {
  Rng rng(5);
  const auto vf = random_video("v", 10, 4, rng);
  const std::vector<TrainingExample> batch{{&vf, {0, 3}, random_unit(4, rng)},
                                           {&vf, {5, 9}, random_unit(4, rng)}};
  const AdapterParams p = init_adapter(4, 2, 9);
  const BatchLoss l = nce_batch_loss(p, batch);
  CHECK(l.grad.w1.isZero(0.0));
  CHECK(l.grad.b1.isZero(0.0));
  CHECK_FALSE(l.grad.w2.isZero(0.0));
}

std::vector<TrainingExample> toy_corpus(std::vector<VideoFeatures>& videos,
                                        Rng& rng) {
  // Each example's span is pushed towards its query, so the task is learnable.
  const std::size_t dim = 6;
  std::vector<TrainingExample> out;
  for (int v = 0; v < 4; ++v) {
    std::vector<float> data(40 * dim);
    std::vector<std::vector<double>> qs;
    for (auto& x : data) x = static_cast<float>(0.3 * rng.normal());
    for (int s = 0; s < 4; ++s) {
      qs.push_back(random_unit(dim, rng));
      for (int t = s * 10; t < s * 10 + 5; ++t) {
        for (std::size_t k = 0; k < dim; ++k) {
          data[t * dim + k] += static_cast<float>(qs.back()[k]);
        }
      }
    }
    videos.emplace_back("v" + std::to_string(v), dim, 40, 1.875, std::move(data));
    for (int s = 0; s < 4; ++s) {
      out.push_back({nullptr, {s * 10, s * 10 + 5}, qs[s]});
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].video = &videos[i / 4];
  return out;
}

TEST_CASE("training") {
  Rng rng(8);
  std::vector<VideoFeatures> videos;
  videos.reserve(4);
  const auto examples = toy_corpus(videos, rng);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.lr = 0.05;
  cfg.batch = 16;
  cfg.seed = 3;

  SUBCASE("zero epochs return the initial adapter") {
    cfg.epochs = 0;
    const TrainResult r = train_adapter(examples, cfg);
    CHECK(r.params == init_adapter(6, 3, 3));
    CHECK(r.epoch_loss.empty());
  }
  SUBCASE("loss falls and reruns are bitwise identical") {
    const TrainResult a = train_adapter(examples, cfg);
    const TrainResult b = train_adapter(examples, cfg);
    REQUIRE(a.epoch_loss.size() == 40);
    CHECK(a.epoch_loss.back() < a.epoch_loss.front());
    std::size_t stalls = 0;
    for (std::size_t e = 1; e < a.epoch_loss.size(); ++e) {
      stalls += a.epoch_loss[e] >= a.epoch_loss[e - 1] ? 1 : 0;
    }
    CHECK(stalls <= 4);
    CHECK(a.params == b.params);
    CHECK(a.epoch_loss == b.epoch_loss);
    CHECK_FALSE(a.params.is_identity());
  }
  SUBCASE("invalid settings") {
    cfg.batch = 0;
    CHECK(kind_of([&] { train_adapter(examples, cfg); }) == ErrorKind::kConfig);
    CHECK(kind_of([&] { train_adapter({}, TrainConfig{}); }) ==
          ErrorKind::kConfig);
  }
  SUBCASE("divergence aborts with a data error") {
    cfg.lr = 1e300;
    CHECK(kind_of([&] { train_adapter(examples, cfg); }) == ErrorKind::kData);
  }
}

TEST_CASE("weights survive a save/load cycle bit for bit") {
  TempDir dir;
  Rng rng(12);
  const AdapterParams p = testing::random_adapter(5, 2, rng, 0.7);
  nlohmann::ordered_json extra;
  extra["note"] = "kept";
  save_adapter(p, dir / "a.json", extra);
  CHECK(load_adapter(dir / "a.json") == p);
  const auto j = nlohmann::json::parse(testing::read_file(dir / "a.json"));
  CHECK(j["dim"] == 5);
  CHECK(j["hidden"] == 2);
  CHECK(j["w1"].size() == 10);
  CHECK(j["w1"][1].get<double>() == p.w1(0, 1));
  CHECK(j["note"] == "kept");

  testing::write_file(dir / "bad.json", R"({"dim":2,"hidden":1,"w1":[1]})");
  CHECK(kind_of([&] { load_adapter(dir / "bad.json"); }) != ErrorKind::kIo);
  CHECK(kind_of([&] { load_adapter(dir / "missing.json"); }) == ErrorKind::kIo);
}

}  // namespace
}  // namespace winground
