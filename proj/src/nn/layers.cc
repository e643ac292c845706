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

#include "tdp/nn/layers.h"

#include <cmath>

namespace tdp::nn {

Linear Linear::Create(ParameterCollection& pc, const std::string& name, int in, int out,
                      std::mt19937_64& rng) {
  Linear l;
  l.w = &pc.Add(name + "/w", out, in, Init::kGlorot, rng);
  l.b = &pc.Add(name + "/b", out, 1, Init::kZero, rng);
  return l;
}

Expr Linear::operator()(Graph& g, Expr x) const {
  return Add(MatMul(g.Param(*w), x), g.Param(*b));
}

LayerNorm LayerNorm::Create(ParameterCollection& pc, const std::string& name, int dim,
                            std::mt19937_64& rng) {
  LayerNorm l;
  l.gamma = &pc.Add(name + "/gamma", dim, 1, Init::kOne, rng);
  l.beta = &pc.Add(name + "/beta", dim, 1, Init::kZero, rng);
  return l;
}

Expr LayerNorm::operator()(Graph& g, Expr x) const {
  return LayerNormCols(x, g.Param(*gamma), g.Param(*beta));
}

BiLstm BiLstm::Create(ParameterCollection& pc, const std::string& name, int in, int hidden,
                      std::mt19937_64& rng) {
  BiLstm l;
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string p = name + "/" + dir;
    Parameter& wx = pc.Add(p + "/wx", 4 * hidden, in, Init::kGlorot, rng);
    Parameter& wh = pc.Add(p + "/wh", 4 * hidden, hidden, Init::kGlorot, rng);
    Parameter& b = pc.Add(p + "/b", 4 * hidden, 1, Init::kZero, rng);
    b.value.middleRows(hidden, hidden).setOnes();
    if (std::string(dir) == "fwd") {
      l.fwd_wx = &wx, l.fwd_wh = &wh, l.fwd_b = &b;
    } else {
      l.bwd_wx = &wx, l.bwd_wh = &wh, l.bwd_b = &b;
    }
  }
  return l;
}

Expr BiLstm::operator()(Graph& g, Expr x) const {
  const Expr parts[] = {
      Lstm(x, g.Param(*fwd_wx), g.Param(*fwd_wh), g.Param(*fwd_b), false),
      Lstm(x, g.Param(*bwd_wx), g.Param(*bwd_wh), g.Param(*bwd_b), true)};
  return ConcatRows(parts);
}

void Adam::Step(ParameterCollection& params) {
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  const double step = config_.learning_rate * std::sqrt(c2) / c1;
  for (const auto& p : params.all()) {
    if (!p->trainable) {
      p->grad.setZero();
      continue;
    }
    if (p->m.size() != p->value.size()) {
      p->m = Matrix::Zero(p->value.rows(), p->value.cols());
      p->v = Matrix::Zero(p->value.rows(), p->value.cols());
    }
    p->m = config_.beta1 * p->m + (1.0 - config_.beta1) * p->grad;
    p->v = config_.beta2 * p->v + (1.0 - config_.beta2) * p->grad.cwiseAbs2();
    p->value.array() -=
        step * p->m.array() / (p->v.array().sqrt() + config_.epsilon * std::sqrt(c2));
    p->grad.setZero();
  }
}

}  // namespace tdp::nn
