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

#ifndef WINGROUND_ERROR_HPP_
#define WINGROUND_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace winground {

enum class ErrorKind {
  kFormat,      // bad magic, version or dtype
  kTruncation,  // payload length disagrees with header
  kData,        // non-finite or otherwise unusable values
  kIo,
  kParse,
  kDuplicate,
  kConfig,
  kBounds,
  kValidation,
  kPairing,     // query/video dimension mismatch
  kShape,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace winground

#endif  // WINGROUND_ERROR_HPP_
