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

#ifndef WINGROUND_PIPELINE_HPP_
#define WINGROUND_PIPELINE_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "winground/adapter.hpp"
#include "winground/evaluation.hpp"
#include "winground/feature_store.hpp"
#include "winground/ranking.hpp"

namespace winground {

// Resolved settings of a grounding run, embedded in the files a run writes.
// The thread count is not part of it.
struct RunConfig {
  LocalizeConfig localize;
  double margin = 0.2;
  std::uint64_t seed = 42;
  std::optional<std::string> adapter_path;
  std::optional<std::string> proposals_path;
  bool cosine = false;

  nlohmann::ordered_json to_json() const;
};

struct GroundingRun {
  std::vector<GroundingResult> results;  // parallel to the input queries
  Efficiency efficiency;
};

// Runs `localize` for every query, spread over `threads` workers. The output
// does not depend on the thread count.
GroundingRun ground_all(std::span<const QueryFeatures> queries,
                        const VideoStore& store, const AdapterParams& params,
                        const LocalizeConfig& config,
                        const std::vector<Proposal>* external = nullptr,
                        std::size_t threads = 1);

PredictionSet to_prediction_set(const GroundingRun& run,
                                const nlohmann::ordered_json& run_config);

// Window containing the annotated span was kept by the pre-filter.
bool gt_window_retained(const GroundingResult& result, const VideoFeatures& vf,
                        std::int64_t window_length, TimeSpan gt);

// Pairs annotations with their queries and videos.
std::vector<TrainingExample> make_training_examples(
    const VideoStore& store, std::span<const QueryFeatures> queries,
    std::span<const Annotation> anns);

// Identity adapter of the store's dimension (hidden = dim / 2).
AdapterParams identity_adapter(std::size_t dim);

}  // namespace winground

#endif  // WINGROUND_PIPELINE_HPP_
