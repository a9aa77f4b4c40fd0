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

#ifndef WINGROUND_FEATURE_STORE_HPP_
#define WINGROUND_FEATURE_STORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winground/spans.hpp"

namespace winground {

// CONEF file layout (all little-endian):
//   "CONEF" | version u8 | dtype u8 | reserved u8 | dim u32 | count u32 |
//   feature_hz f64 | count*dim f32 row-major
inline constexpr char kConefMagic[5] = {'C', 'O', 'N', 'E', 'F'};
inline constexpr std::uint8_t kConefVersion = 1;
inline constexpr std::uint8_t kConefDtypeF32 = 0;
inline constexpr std::size_t kConefHeaderSize = 24;

// An immutable sequence of frame embeddings. Construction validates every
// invariant; there is no way to obtain a partially valid instance.
class VideoFeatures {
 public:
  VideoFeatures(std::string video_id, std::size_t dim, std::size_t count,
                double feature_hz, std::vector<float> data);

  const std::string& video_id() const { return video_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  double feature_hz() const { return feature_hz_; }
  double duration_seconds() const {
    return static_cast<double>(count_) / feature_hz_;
  }

  std::span<const float> row(std::size_t j) const {
    return {data_.data() + j * dim_, dim_};
  }
  std::span<const float> data() const { return data_; }

  // Bit-level equality of header fields and payload.
  friend bool operator==(const VideoFeatures& a, const VideoFeatures& b);

 private:
  std::string video_id_;
  std::size_t dim_;
  std::size_t count_;
  double feature_hz_;
  std::vector<float> data_;
};

struct QueryFeatures {
  std::string query_id;
  std::string video_id;
  std::string text;
  std::vector<double> cls;
  std::optional<std::vector<std::vector<double>>> tokens;

  std::size_t dim() const { return cls.size(); }
};

// Reads a CONEF file. The video id is the file stem, since the binary
// header carries no name.
VideoFeatures load_video_features(const std::filesystem::path& path);

// Writes `vf` as CONEF. Output bytes depend only on `vf`.
void save_video_features(const VideoFeatures& vf,
                         const std::filesystem::path& path);

// Parses a line-delimited query file. Blank lines are skipped but still
// counted for error messages.
std::vector<QueryFeatures> load_queries(const std::filesystem::path& path);
void save_queries(const std::vector<QueryFeatures>& queries,
                  const std::filesystem::path& path);

// Throws a pairing error when dimensions disagree.
void check_pairing(const VideoFeatures& vf, const QueryFeatures& q);

// Row-wise L2-normalized copy, used for cosine scoring.
VideoFeatures l2_normalized(const VideoFeatures& vf);
QueryFeatures l2_normalized(const QueryFeatures& q);

// Frame j covers [j / hz, (j + 1) / hz) seconds.
TimeSpan frame_time_span(std::size_t j, double feature_hz);

// Videos keyed by id. Loading a directory picks up every *.conef file.
class VideoStore {
 public:
  VideoStore() = default;

  static VideoStore load_directory(const std::filesystem::path& dir);

  void add(VideoFeatures vf);
  const VideoFeatures* find(const std::string& video_id) const;
  const VideoFeatures& at(const std::string& video_id) const;
  std::size_t size() const { return videos_.size(); }
  auto begin() const { return videos_.begin(); }
  auto end() const { return videos_.end(); }

 private:
  std::map<std::string, VideoFeatures> videos_;
};

}  // namespace winground

#endif  // WINGROUND_FEATURE_STORE_HPP_
