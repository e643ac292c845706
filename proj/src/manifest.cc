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

#include "tdp/manifest.h"

#include <fstream>

#include "tdp/errors.h"

#ifndef TDP_VERSION
#define TDP_VERSION "unknown"
#endif

namespace tdp {

std::string_view ToolkitVersion() { return TDP_VERSION; }

nlohmann::json RunManifest::ToJson() const {
  nlohmann::json j{{"command", command},
                   {"toolkit_version", ToolkitVersion()},
                   {"config", config},
                   {"inputs", inputs},
                   {"outputs", outputs},
                   {"results", results},
                   {"wall_clock_seconds", seconds}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

void RunManifest::Write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << ToJson().dump(2) << '\n';
  if (!out) throw Error("failed writing manifest " + path.string());
}

}  // namespace tdp
