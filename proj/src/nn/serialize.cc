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

#include "tdp/nn/serialize.h"

#include <set>

#include "tdp/errors.h"

namespace tdp::nn {

using nlohmann::json;

json MatrixToJson(const Matrix& m) {
  std::vector<double> data;
  data.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix MatrixFromJson(const json& j, const std::string& what) {
  try {
    const long rows = j.at("rows").get<long>();
    const long cols = j.at("cols").get<long>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() ||
        data.size() != static_cast<std::size_t>(rows * cols)) {
      throw ConfigError(what + ": matrix data does not match its shape");
    }
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(what + ": malformed matrix (" + e.what() + ")");
  }
}

json ParametersToJson(const ParameterCollection& params, const std::string& prefix) {
  json out = json::object();
  for (const auto& p : params.all()) {
    if (p->name.rfind(prefix, 0) != 0) continue;
    out[p->name.substr(prefix.size())] = MatrixToJson(p->value);
  }
  return out;
}

void AssignParameters(ParameterCollection& params, const json& j, const std::string& prefix,
                      const std::string& source) {
  if (!j.is_object()) throw ConfigError(source + ": parameters must be an object");
  std::set<std::string> expected;
  for (const auto& p : params.all()) {
    if (p->name.rfind(prefix, 0) != 0) continue;
    const std::string key = p->name.substr(prefix.size());
    expected.insert(key);
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(source + ": missing parameter " + key);
    Matrix m = MatrixFromJson(*it, source + ": parameter " + key);
    if (m.rows() != p->value.rows() || m.cols() != p->value.cols()) {
      throw ConfigError(source + ": parameter " + key + " has shape " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                        ", expected " + std::to_string(p->value.rows()) + "x" +
                        std::to_string(p->value.cols()));
    }
    p->value = std::move(m);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!expected.count(it.key())) {
      throw ConfigError(source + ": unexpected parameter " + it.key());
    }
  }
}

}  // namespace tdp::nn
