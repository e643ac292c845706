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

// JSON encoding of matrices and parameter collections.

#ifndef TDP_NN_SERIALIZE_H_
#define TDP_NN_SERIALIZE_H_

#include <string>

#include "json.hpp"
#include "tdp/nn/graph.h"

namespace tdp::nn {

// {"rows": r, "cols": c, "data": [row-major values]}
nlohmann::json MatrixToJson(const Matrix& m);
// Throws ConfigError mentioning `what` on malformed input.
Matrix MatrixFromJson(const nlohmann::json& j, const std::string& what);

// Parameters whose names start with `prefix`, keyed by the remainder of
// the name.
nlohmann::json ParametersToJson(const ParameterCollection& params,
                                const std::string& prefix = "");

// Overwrites every parameter under `prefix` from `j` (keyed as above).
// Missing, unexpected or mis-shaped entries raise ConfigError naming
// `source`.
void AssignParameters(ParameterCollection& params, const nlohmann::json& j,
                      const std::string& prefix, const std::string& source);

}  // namespace tdp::nn

#endif  // TDP_NN_SERIALIZE_H_
