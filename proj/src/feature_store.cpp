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

#include "winground/feature_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "winground/error.hpp"

namespace winground {
namespace {

static_assert(std::numeric_limits<float>::is_iec559);
static_assert(std::numeric_limits<double>::is_iec559);

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename U>
U get_le(const unsigned char* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(p[i]) << (8 * i);
  }
  return value;
}

bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::vector<double> parse_vector(const nlohmann::json& j, const char* what,
                                 std::size_t line) {
  if (!j.is_array()) {
    fail(ErrorKind::kParse, "line " + std::to_string(line) + ": '" + what +
                                "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) {
      fail(ErrorKind::kParse, "line " + std::to_string(line) + ": '" + what +
                                  "' contains a non-number");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

const nlohmann::json& require(const nlohmann::json& rec, const char* key,
                              std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) {
    fail(ErrorKind::kParse, "line " + std::to_string(line) +
                                ": missing key '" + key + "'");
  }
  return *it;
}

std::string require_string(const nlohmann::json& rec, const char* key,
                           std::size_t line) {
  const auto& v = require(rec, key, line);
  if (!v.is_string()) {
    fail(ErrorKind::kParse, "line " + std::to_string(line) + ": '" + key +
                                "' must be a string");
  }
  return v.get<std::string>();
}

QueryFeatures parse_query(const nlohmann::json& rec, std::size_t line) {
  if (!rec.is_object()) {
    fail(ErrorKind::kParse,
         "line " + std::to_string(line) + ": record is not an object");
  }
  QueryFeatures q;
  q.query_id = require_string(rec, "query_id", line);
  q.video_id = require_string(rec, "video_id", line);
  q.text = require_string(rec, "text", line);
  q.cls = parse_vector(require(rec, "cls", line), "cls", line);
  if (q.cls.empty()) {
    fail(ErrorKind::kParse, "line " + std::to_string(line) + ": empty 'cls'");
  }
  if (!all_finite(q.cls)) {
    fail(ErrorKind::kData,
         "line " + std::to_string(line) + ": non-finite 'cls' entry");
  }
  if (auto it = rec.find("tokens"); it != rec.end() && !it->is_null()) {
    if (!it->is_array()) {
      fail(ErrorKind::kParse, "line " + std::to_string(line) +
                                  ": 'tokens' must be an array of arrays");
    }
    std::vector<std::vector<double>> tokens;
    for (const auto& row : *it) {
      tokens.push_back(parse_vector(row, "tokens", line));
      if (tokens.back().size() != q.cls.size()) {
        fail(ErrorKind::kShape, "line " + std::to_string(line) +
                                    ": token row width differs from cls");
      }
      if (!all_finite(tokens.back())) {
        fail(ErrorKind::kData,
             "line " + std::to_string(line) + ": non-finite token entry");
      }
    }
    q.tokens = std::move(tokens);
  }
  return q;
}

}  // namespace

VideoFeatures::VideoFeatures(std::string video_id, std::size_t dim,
                             std::size_t count, double feature_hz,
                             std::vector<float> data)
    : video_id_(std::move(video_id)),
      dim_(dim),
      count_(count),
      feature_hz_(feature_hz),
      data_(std::move(data)) {
  if (dim_ == 0 || count_ == 0) {
    fail(ErrorKind::kData, "video '" + video_id_ + "' has dim=" +
                               std::to_string(dim_) +
                               " count=" + std::to_string(count_));
  }
  if (!(std::isfinite(feature_hz_) && feature_hz_ > 0.0)) {
    fail(ErrorKind::kData,
         "video '" + video_id_ + "' has non-positive feature rate");
  }
  if (data_.size() != dim_ * count_) {
    fail(ErrorKind::kTruncation, "video '" + video_id_ + "' holds " +
                                     std::to_string(data_.size()) +
                                     " values, header declares " +
                                     std::to_string(dim_ * count_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      fail(ErrorKind::kData, "video '" + video_id_ +
                                 "' has a non-finite value at frame " +
                                 std::to_string(i / dim_));
    }
  }
}

bool operator==(const VideoFeatures& a, const VideoFeatures& b) {
  return a.video_id_ == b.video_id_ && a.dim_ == b.dim_ &&
         a.count_ == b.count_ &&
         std::bit_cast<std::uint64_t>(a.feature_hz_) ==
             std::bit_cast<std::uint64_t>(b.feature_hz_) &&
         a.data_.size() == b.data_.size() &&
         std::memcmp(a.data_.data(), b.data_.data(),
                     a.data_.size() * sizeof(float)) == 0;
}

VideoFeatures load_video_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < sizeof(kConefMagic) ||
      std::memcmp(p, kConefMagic, sizeof(kConefMagic)) != 0) {
    fail(ErrorKind::kFormat, path.string() + " does not start with CONEF");
  }
  if (bytes.size() < kConefHeaderSize) {
    fail(ErrorKind::kTruncation, path.string() + " has a short header");
  }
  if (p[5] != kConefVersion) {
    fail(ErrorKind::kFormat, path.string() + " has unsupported version " +
                                 std::to_string(p[5]));
  }
  if (p[6] != kConefDtypeF32) {
    fail(ErrorKind::kFormat,
         path.string() + " has unsupported dtype " + std::to_string(p[6]));
  }
  if (p[7] != 0) {
    fail(ErrorKind::kFormat, path.string() + " has a non-zero reserved byte");
  }
  const std::uint32_t dim = get_le<std::uint32_t>(p + 8);
  const std::uint32_t count = get_le<std::uint32_t>(p + 12);
  const double hz = std::bit_cast<double>(get_le<std::uint64_t>(p + 16));

  const std::uint64_t expected =
      static_cast<std::uint64_t>(dim) * count * sizeof(float);
  const std::uint64_t payload = bytes.size() - kConefHeaderSize;
  if (payload != expected) {
    fail(ErrorKind::kTruncation,
         path.string() + ": payload is " + std::to_string(payload) +
             " bytes, header declares " + std::to_string(expected));
  }
  std::vector<float> data(static_cast<std::size_t>(dim) * count);
  const unsigned char* q = p + kConefHeaderSize;
  for (std::size_t i = 0; i < data.size(); ++i, q += 4) {
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(q));
  }
  return VideoFeatures(path.stem().string(), dim, count, hz, std::move(data));
}

void save_video_features(const VideoFeatures& vf,
                         const std::filesystem::path& path) {
  if (vf.dim() > UINT32_MAX || vf.count() > UINT32_MAX) {
    fail(ErrorKind::kData, "video '" + vf.video_id() + "' too large for CONEF");
  }
  std::string out;
  out.reserve(kConefHeaderSize + vf.data().size() * sizeof(float));
  out.append(kConefMagic, sizeof(kConefMagic));
  out.push_back(static_cast<char>(kConefVersion));
  out.push_back(static_cast<char>(kConefDtypeF32));
  out.push_back(0);
  put_le(out, static_cast<std::uint32_t>(vf.dim()));
  put_le(out, static_cast<std::uint32_t>(vf.count()));
  put_le(out, std::bit_cast<std::uint64_t>(vf.feature_hz()));
  for (float x : vf.data()) put_le(out, std::bit_cast<std::uint32_t>(x));

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) fail(ErrorKind::kIo, "short write to " + path.string());
}

std::vector<QueryFeatures> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<QueryFeatures> out;
  std::set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::kParse, "line " + std::to_string(line) + ": " + e.what());
    }
    QueryFeatures q = parse_query(rec, line);
    if (!seen.insert(q.query_id).second) {
      fail(ErrorKind::kDuplicate, "line " + std::to_string(line) +
                                      ": query_id '" + q.query_id +
                                      "' already defined");
    }
    out.push_back(std::move(q));
  }
  return out;
}

void save_queries(const std::vector<QueryFeatures>& queries,
                  const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& q : queries) {
    nlohmann::ordered_json rec;
    rec["query_id"] = q.query_id;
    rec["video_id"] = q.video_id;
    rec["text"] = q.text;
    rec["cls"] = q.cls;
    if (q.tokens) rec["tokens"] = *q.tokens;
    os << rec.dump() << '\n';
  }
  if (!os) fail(ErrorKind::kIo, "short write to " + path.string());
}

void check_pairing(const VideoFeatures& vf, const QueryFeatures& q) {
  if (vf.dim() != q.dim()) {
    fail(ErrorKind::kPairing, "query '" + q.query_id + "' has dim " +
                                  std::to_string(q.dim()) + ", video '" +
                                  vf.video_id() + "' has dim " +
                                  std::to_string(vf.dim()));
  }
}

VideoFeatures l2_normalized(const VideoFeatures& vf) {
  std::vector<float> data(vf.data().begin(), vf.data().end());
  for (std::size_t j = 0; j < vf.count(); ++j) {
    double norm2 = 0.0;
    for (float x : vf.row(j)) norm2 += static_cast<double>(x) * x;
    if (norm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < vf.dim(); ++k) {
      data[j * vf.dim() + k] = static_cast<float>(data[j * vf.dim() + k] * inv);
    }
  }
  return VideoFeatures(vf.video_id(), vf.dim(), vf.count(), vf.feature_hz(),
                       std::move(data));
}

QueryFeatures l2_normalized(const QueryFeatures& q) {
  QueryFeatures out = q;
  double norm2 = 0.0;
  for (double x : q.cls) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : out.cls) x *= inv;
  }
  return out;
}

TimeSpan frame_time_span(std::size_t j, double feature_hz) {
  return {static_cast<double>(j) / feature_hz,
          static_cast<double>(j + 1) / feature_hz};
}

VideoStore VideoStore::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    fail(ErrorKind::kIo, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".conef") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  VideoStore store;
  for (const auto& f : files) store.add(load_video_features(f));
  return store;
}

void VideoStore::add(VideoFeatures vf) {
  std::string id = vf.video_id();
  if (!videos_.emplace(id, std::move(vf)).second) {
    fail(ErrorKind::kDuplicate, "video '" + id + "' loaded twice");
  }
}

const VideoFeatures* VideoStore::find(const std::string& video_id) const {
  auto it = videos_.find(video_id);
  return it == videos_.end() ? nullptr : &it->second;
}

const VideoFeatures& VideoStore::at(const std::string& video_id) const {
  const VideoFeatures* vf = find(video_id);
  if (vf == nullptr) {
    fail(ErrorKind::kPairing, "no features for video '" + video_id + "'");
  }
  return *vf;
}

}  // namespace winground
