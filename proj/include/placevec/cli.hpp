//  Copyright 2026 The placevec Authors. All Rights Reserved.
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.


#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace placevec::cli {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitModuleError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args[0]` is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

/// Reads a flat `key=value` file (blank lines and `#` comments ignored) into
/// `--key=value` tokens. Throws std::runtime_error naming the path if it
/// cannot be read, and on lines without `=`.
std::vector<std::string> config_tokens(const std::filesystem::path& file);

}  // namespace placevec::cli
