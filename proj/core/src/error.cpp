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

#include "vital/error.hpp"

namespace vital {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kFixture: return "fixture error";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kExhausted: return "retries exhausted";
    case ErrorKind::kDecode: return "decode error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kDegenerate: return "degenerate input";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace vital
