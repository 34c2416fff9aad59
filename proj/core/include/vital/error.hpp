// Copyright 2026 The ViTaL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vital {

/// Failure categories shared by every module. The CLI maps these onto exit
/// codes, so adding a kind means deciding its exit code in tools/.
enum class ErrorKind {
  kShape,             // dimension mismatch between operands
  kConfig,            // invalid configuration or parameters
  kInput,             // malformed or empty input data
  kRange,             // value outside its permitted range
  kParse,             // text did not match a grammar
  kFixture,           // scripted backend lookup failure
  kProtocol,          // remote service returned a non-retryable status
  kExhausted,         // retry budget used up
  kDecode,            // remote response body could not be decoded
  kValidation,        // manifest / ground-truth validation failure
  kData,              // missing or invalid measurement
  kDegenerate,        // statistic undefined for the input (e.g. constant series)
  kInsufficientData,  // too few joined objects for evaluation
  kIo,                // filesystem failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Remote service failure that carries the HTTP status (0 when no response).
class ProtocolError : public Error {
 public:
  ProtocolError(ErrorKind kind, int status, const std::string& message)
      : Error(kind, message), status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace vital
