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

#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "test_util.hpp"
#include "winground/error.hpp"
#include "winground/random.hpp"

namespace winground {
namespace {

using testing::kind_of;
using testing::make_video;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

TEST_CASE("CONEF round trip keeps header and rows") {
  TempDir dir;
  const auto vf = make_video("clip", {{1, 0}, {0, 1}, {1, 1}});
  save_video_features(vf, dir / "clip.conef");
  const auto back = load_video_features(dir / "clip.conef");
  CHECK(back == vf);
  CHECK(back.dim() == 2);
  CHECK(back.count() == 3);
  CHECK(back.feature_hz() == 1.875);
  CHECK(back.row(2)[0] == 1.0f);
  CHECK(back.row(2)[1] == 1.0f);
}

TEST_CASE("header layout is byte-exact") {
  TempDir dir;
  save_video_features(make_video("h", {{1.0f}}), dir / "h.conef");
  const std::string bytes = read_file(dir / "h.conef");
  REQUIRE(bytes.size() == kConefHeaderSize + 4);
  CHECK(bytes.substr(0, 5) == "CONEF");
  CHECK(bytes[5] == 1);
  CHECK(bytes[6] == 0);
  CHECK(bytes[7] == 0);
  const unsigned char dim_le[4] = {1, 0, 0, 0};
  CHECK(std::memcmp(bytes.data() + 8, dim_le, 4) == 0);
  CHECK(std::memcmp(bytes.data() + 12, dim_le, 4) == 0);
  // 1.875 = 0x3FFE000000000000, stored little-endian.
  const unsigned char hz_le[8] = {0, 0, 0, 0, 0, 0, 0xFE, 0x3F};
  CHECK(std::memcmp(bytes.data() + 16, hz_le, 8) == 0);
  const unsigned char one_le[4] = {0, 0, 0x80, 0x3F};
  CHECK(std::memcmp(bytes.data() + 24, one_le, 4) == 0);
}

TEST_CASE("ninety features at 1.875 Hz last 48 seconds") {
  std::vector<std::vector<float>> rows(90, std::vector<float>{0.5f});
  CHECK(make_video("v", rows).duration_seconds() == 48.0);
  const TimeSpan last = frame_time_span(89, 1.875);
  CHECK(last.end == 48.0);
}

TEST_CASE("malformed CONEF files map to typed errors") {
  TempDir dir;
  save_video_features(make_video("v", {{1, 2}, {3, 4}}), dir / "v.conef");
  const std::string good = read_file(dir / "v.conef");

  SUBCASE("short payload") {
    write_file(dir / "t.conef", good.substr(0, good.size() - 4));
    CHECK(kind_of([&] { load_video_features(dir / "t.conef"); }) ==
          ErrorKind::kTruncation);
  }
  SUBCASE("trailing bytes") {
    write_file(dir / "t.conef", good + "xxxx");
    CHECK(kind_of([&] { load_video_features(dir / "t.conef"); }) ==
          ErrorKind::kTruncation);
  }
  SUBCASE("bad magic") {
    std::string bad = good;
    bad[0] = 'X';
    write_file(dir / "t.conef", bad);
    CHECK(kind_of([&] { load_video_features(dir / "t.conef"); }) ==
          ErrorKind::kFormat);
  }
  SUBCASE("bad version") {
    std::string bad = good;
    bad[5] = 2;
    write_file(dir / "t.conef", bad);
    CHECK(kind_of([&] { load_video_features(dir / "t.conef"); }) ==
          ErrorKind::kFormat);
  }
  SUBCASE("non-finite value") {
    std::string bad = good;
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(bad.data() + kConefHeaderSize + 8, &nan, 4);
    write_file(dir / "t.conef", bad);
    CHECK(kind_of([&] { load_video_features(dir / "t.conef"); }) ==
          ErrorKind::kData);
  }
  SUBCASE("missing file") {
    CHECK(kind_of([&] { load_video_features(dir / "none.conef"); }) ==
          ErrorKind::kIo);
  }
}

TEST_CASE("invalid videos cannot be constructed") {
  CHECK(kind_of([] { VideoFeatures("v", 0, 1, 1.0, {}); }) == ErrorKind::kData);
  CHECK(kind_of([] { VideoFeatures("v", 1, 1, 0.0, {1.0f}); }) ==
        ErrorKind::kData);
  CHECK(kind_of([] { VideoFeatures("v", 2, 2, 1.0, {1.0f}); }) ==
        ErrorKind::kTruncation);
}

TEST_CASE("saves are deterministic and round trips are bit-exact") {
  TempDir dir;
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = 1 + rng.below(9);
    const std::size_t count = 1 + rng.below(30);
    std::vector<float> data(dim * count);
    for (float& x : data) x = static_cast<float>(rng.normal() * 1e3);
    const VideoFeatures vf("r", dim, count, rng.uniform(0.1, 30.0), data);
    save_video_features(vf, dir / "r.conef");
    save_video_features(vf, dir / "s.conef");
    CHECK(read_file(dir / "r.conef") == read_file(dir / "s.conef"));
    CHECK(load_video_features(dir / "r.conef") == vf);
  }
}

TEST_CASE("query file parsing") {
  TempDir dir;
  const std::string l1 =
      R"({"query_id":"q1","video_id":"v","text":"a","cls":[1,0]})";
  const std::string l2 =
      R"({"query_id":"q2","video_id":"v","text":"b","cls":[0,1],"tokens":[[1,1],[2,2]]})";
  const std::string l3 =
      R"({"query_id":"q3","video_id":"w","text":"c","cls":[0.5,0.5]})";

  SUBCASE("records come back in file order") {
    write_file(dir / "q.jsonl", l1 + "\n" + l2 + "\n" + l3 + "\n");
    const auto qs = load_queries(dir / "q.jsonl");
    REQUIRE(qs.size() == 3);
    CHECK(qs[0].query_id == "q1");
    CHECK(qs[1].tokens->size() == 2);
    CHECK(qs[2].video_id == "w");
    CHECK(qs[2].cls == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("missing cls names the line") {
    write_file(dir / "q.jsonl",
               l1 + "\n" + R"({"query_id":"q2","video_id":"v","text":"b"})" +
                   "\n");
    try {
      load_queries(dir / "q.jsonl");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kParse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("duplicate ids are rejected") {
    write_file(dir / "q.jsonl", l1 + "\n" + l1 + "\n");
    CHECK(kind_of([&] { load_queries(dir / "q.jsonl"); }) ==
          ErrorKind::kDuplicate);
  }
  SUBCASE("token rows must match cls width") {
    write_file(dir / "q.jsonl",
               R"({"query_id":"q","video_id":"v","text":"","cls":[1,0],"tokens":[[1]]})"
               "\n");
    CHECK(kind_of([&] { load_queries(dir / "q.jsonl"); }) == ErrorKind::kShape);
  }
  SUBCASE("queries survive a save/load cycle") {
    write_file(dir / "q.jsonl", l1 + "\n" + l2 + "\n");
    const auto qs = load_queries(dir / "q.jsonl");
    save_queries(qs, dir / "r.jsonl");
    const auto back = load_queries(dir / "r.jsonl");
    CHECK(back[1].cls == qs[1].cls);
    CHECK(*back[1].tokens == *qs[1].tokens);
  }
}

TEST_CASE("dimension mismatch is a pairing error") {
  const auto vf = make_video("v", {{1, 0, 0}});
  const auto q = testing::make_query("q", "v", {1, 0});
  CHECK(kind_of([&] { check_pairing(vf, q); }) == ErrorKind::kPairing);
}

TEST_CASE("store loads every conef file in a directory") {
  TempDir dir;
  save_video_features(make_video("b", {{1}}), dir / "b.conef");
  save_video_features(make_video("a", {{2}}), dir / "a.conef");
  write_file(dir / "notes.txt", "ignored");
  const auto store = VideoStore::load_directory(dir.path());
  CHECK(store.size() == 2);
  CHECK(store.at("a").row(0)[0] == 2.0f);
  CHECK(store.find("c") == nullptr);
}

TEST_CASE("l2 normalization yields unit rows") {
  const auto vf = l2_normalized(make_video("v", {{3, 4}, {0, 0}}));
  CHECK(vf.row(0)[0] == doctest::Approx(0.6));
  CHECK(vf.row(0)[1] == doctest::Approx(0.8));
  CHECK(vf.row(1)[0] == 0.0f);
}

}  // namespace
}  // namespace winground
