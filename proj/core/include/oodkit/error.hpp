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

#ifndef OODKIT_ERROR_HPP_
#define OODKIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace oodkit {

// Broad failure categories. The CLI maps kParameter/kConfiguration to exit
// code 2 and everything else to exit code 3.
enum class ErrorKind {
  kParameter,      // an argument is outside its domain (T <= 0, alpha == 1, ...)
  kConfiguration,  // the requested computation cannot run on this data shape
  kInput,          // malformed or inconsistent input data
  kValidation,     // a distribution invariant is violated
  kIo,             // file could not be opened, read or written
};

std::string_view to_string(ErrorKind kind);

// what() is "<kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace oodkit

#endif  // OODKIT_ERROR_HPP_
