// Copyright 2026 The TDP Toolkit Authors.
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

// Run manifests: one JSON record per command invocation describing its
// configuration, inputs, outputs and headline results.

#ifndef TDP_MANIFEST_H_
#define TDP_MANIFEST_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace tdp {

std::string_view ToolkitVersion();

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();   // role -> path
  nlohmann::json outputs = nlohmann::json::object();  // role -> path
  std::optional<std::uint64_t> seed;
  nlohmann::json results = nlohmann::json::object();
  double seconds = 0.0;

  nlohmann::json ToJson() const;
  // Throws Error if the file cannot be written.
  void Write(const std::filesystem::path& path) const;
};

// Measures wall-clock time from construction.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace tdp

#endif  // TDP_MANIFEST_H_
