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

#include "winground/proposals.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "winground/error.hpp"

namespace winground {

void validate(const AnchorConfig& anchors) {
  if (anchors.lengths.empty()) {
    fail(ErrorKind::kConfig, "anchor length set is empty");
  }
  if (anchors.stride <= 0) {
    fail(ErrorKind::kConfig, "anchor stride must be >= 1");
  }
  for (std::size_t i = 0; i < anchors.lengths.size(); ++i) {
    if (anchors.lengths[i] <= 0) {
      fail(ErrorKind::kConfig, "anchor lengths must be >= 1");
    }
    if (i > 0 && anchors.lengths[i] <= anchors.lengths[i - 1]) {
      fail(ErrorKind::kConfig, "anchor lengths must be strictly ascending");
    }
  }
}

std::int64_t lattice_offset(const Window& window, std::int64_t stride) {
  return (stride - window.start % stride) % stride;
}

std::vector<Proposal> generate_anchor_proposals(
    const std::string& query_id, const Window& window,
    std::span<const double> saliency, const AnchorConfig& anchors,
    double feature_hz, std::int64_t offset) {
  validate(anchors);
  if (static_cast<std::int64_t>(saliency.size()) != window.length) {
    fail(ErrorKind::kShape, "saliency has " + std::to_string(saliency.size()) +
                                " entries for a window of length " +
                                std::to_string(window.length));
  }
  if (offset < 0) fail(ErrorKind::kConfig, "negative anchor offset");

  std::vector<Proposal> out;
  for (std::int64_t len : anchors.lengths) {
    for (std::int64_t b = offset; b + len <= window.length;
         b += anchors.stride) {
      double sum = 0.0;
      for (std::int64_t t = b; t < b + len; ++t) sum += saliency[t];
      Proposal prop;
      prop.query_id = query_id;
      prop.window_index = window.index;
      prop.span_frames = to_global(window, {b, b + len});
      prop.span_seconds = frames_to_seconds(prop.span_frames, feature_hz);
      prop.p = sum / static_cast<double>(len);
      out.push_back(std::move(prop));
    }
  }
  return out;
}

std::size_t anchor_count(std::int64_t window_length,
                         const AnchorConfig& anchors, std::int64_t offset) {
  std::size_t n = 0;
  for (std::int64_t len : anchors.lengths) {
    const std::int64_t room = window_length - offset - len;
    if (room >= 0) n += static_cast<std::size_t>(room / anchors.stride + 1);
  }
  return n;
}

std::vector<Proposal> ingest_external_proposals(
    const std::filesystem::path& path, const WindowResolver& resolve) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());

  std::vector<Proposal> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + " line " +
                              std::to_string(line);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::kParse, where + ": " + e.what());
    }
    Proposal prop;
    std::int64_t b = 0;
    std::int64_t e = 0;
    try {
      prop.query_id = rec.at("query_id").get<std::string>();
      prop.window_index = rec.at("window_index").get<std::int64_t>();
      b = rec.at("b").get<std::int64_t>();
      e = rec.at("e").get<std::int64_t>();
      const auto& p = rec.at("p");
      // JSON cannot spell NaN/Inf; accept them as strings so they are
      // reported as data errors instead of parse errors.
      prop.p = p.is_string() ? std::stod(p.get<std::string>())
                             : p.get<double>();
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorKind::kParse, where + ": " + ex.what());
    } catch (const std::logic_error&) {
      fail(ErrorKind::kParse, where + ": 'p' is not a number");
    }
    if (!std::isfinite(prop.p)) {
      fail(ErrorKind::kData, where + ": non-finite proposal score");
    }
    if (b >= e) {
      fail(ErrorKind::kValidation, where + ": empty span [" +
                                       std::to_string(b) + ", " +
                                       std::to_string(e) + ")");
    }
    const auto ref = resolve(prop.query_id, prop.window_index);
    if (!ref) {
      fail(ErrorKind::kValidation,
           where + ": unknown query or window index " +
               std::to_string(prop.window_index));
    }
    if (b < 0 || e > ref->window.length) {
      fail(ErrorKind::kValidation,
           where + ": span [" + std::to_string(b) + ", " + std::to_string(e) +
               ") lies outside window of length " +
               std::to_string(ref->window.length));
    }
    prop.span_frames = to_global(ref->window, {b, e});
    prop.span_seconds = frames_to_seconds(prop.span_frames, ref->feature_hz);
    out.push_back(std::move(prop));
  }
  return out;
}

}  // namespace winground
