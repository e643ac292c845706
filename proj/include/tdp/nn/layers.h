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

// Parameter bundles for the layers used by the encoders, and the Adam
// optimizer.

#ifndef TDP_NN_LAYERS_H_
#define TDP_NN_LAYERS_H_

#include <string>

#include "tdp/nn/graph.h"

namespace tdp::nn {

// y = W x + b, applied to every column of x.
struct Linear {
  Parameter* w = nullptr;
  Parameter* b = nullptr;

  static Linear Create(ParameterCollection& pc, const std::string& name, int in, int out,
                       std::mt19937_64& rng);
  Expr operator()(Graph& g, Expr x) const;
  int out_dim() const { return static_cast<int>(w->value.rows()); }
};

struct LayerNorm {
  Parameter* gamma = nullptr;
  Parameter* beta = nullptr;

  static LayerNorm Create(ParameterCollection& pc, const std::string& name, int dim,
                          std::mt19937_64& rng);
  Expr operator()(Graph& g, Expr x) const;
};

// Forward and backward LSTMs over the columns of x, stacked as 2h x T.
struct BiLstm {
  Parameter* fwd_wx = nullptr;
  Parameter* fwd_wh = nullptr;
  Parameter* fwd_b = nullptr;
  Parameter* bwd_wx = nullptr;
  Parameter* bwd_wh = nullptr;
  Parameter* bwd_b = nullptr;

  // Forget-gate biases start at one.
  static BiLstm Create(ParameterCollection& pc, const std::string& name, int in, int hidden,
                       std::mt19937_64& rng);
  Expr operator()(Graph& g, Expr x) const;
  int hidden() const { return static_cast<int>(fwd_wh->value.cols()); }
};

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  // Updates every trainable parameter from its accumulated gradient, then
  // clears all gradients.
  void Step(ParameterCollection& params);
  long steps() const { return steps_; }

 private:
  AdamConfig config_;
  long steps_ = 0;
};

}  // namespace tdp::nn

#endif  // TDP_NN_LAYERS_H_
