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

#ifndef OODKIT_TOOLS_CLI_HPP_
#define OODKIT_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace oodkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// Environment variable holding the default worker count for `score`.
inline constexpr const char* kThreadsEnv = "OODKIT_THREADS";

// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace oodkit::cli

#endif  // OODKIT_TOOLS_CLI_HPP_
