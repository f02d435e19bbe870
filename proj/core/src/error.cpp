// Copyright 2026 The oodkit Authors.
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

#include "oodkit/error.hpp"

namespace oodkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter:
      return "parameter error";
    case ErrorKind::kConfiguration:
      return "configuration error";
    case ErrorKind::kInput:
      return "input error";
    case ErrorKind::kValidation:
      return "validation error";
    case ErrorKind::kIo:
      return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace oodkit
