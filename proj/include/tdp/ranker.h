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

// The ranking model: every (candidate parent, legal label) pair of a child
// gets a score from a tanh feed-forward layer over the pair encoding, and
// one softmax spans all rows of the child. The loss is the negative log
// probability of the gold row.

#ifndef TDP_RANKER_H_
#define TDP_RANKER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "json.hpp"
#include "tdp/candidates.h"
#include "tdp/decoder.h"
#include "tdp/encoder.h"
#include "tdp/nn/graph.h"
#include "tdp/nn/layers.h"
#include "tdp/score_table.h"

namespace tdp {

struct RankerConfig {
  WindowConfig window;
  EncoderConfig encoder;
  int ff_hidden_dim = 100;

  void Validate() const;
  nlohmann::json ToJson() const;
  static RankerConfig FromJson(const nlohmann::json& j);
};

class RankerModel {
 public:
  // Fresh parameters drawn from `seed`.
  RankerModel(const RankerConfig& config, const EncoderResources& resources,
              std::uint64_t seed, EncoderStats* stats = nullptr);

  const RankerConfig& config() const { return config_; }
  nn::ParameterCollection& params() { return params_; }
  const nn::ParameterCollection& params() const { return params_; }
  const PairEncoder& encoder() const { return *encoder_; }

  // Raw scores (rows x 1) in the row order of EmptyScoreTable(doc, candidates).
  nn::Expr ScoreExpr(nn::Graph& g, DocumentState& state, const Document& doc,
                     const CandidateSet& candidates) const;

  // Evaluation-mode scoring; thread-safe.
  ScoreTable ScoreChild(const Document& doc, const CandidateSet& candidates) const;
  // One table per mention over its window candidates.
  std::vector<ScoreTable> ScoreDocument(const Document& doc) const;
  DecodeResult Parse(const Document& doc) const;

  void Save(const std::filesystem::path& path) const;
  // Throws ConfigError naming `path` for unreadable, malformed or
  // inconsistent checkpoints.
  static std::unique_ptr<RankerModel> Load(const std::filesystem::path& path);

 private:
  RankerConfig config_;
  nn::ParameterCollection params_;
  std::unique_ptr<PairEncoder> encoder_;
  nn::Linear hidden_;
  nn::Linear output_;
};

// Index of the (parent, label) row; PreconditionError if absent.
int GoldRow(const ScoreTable& table, int parent, RelationLabel label);

// -log p(gold row) from the table's raw scores.
double RankingLoss(const ScoreTable& table, int gold_parent, RelationLabel gold_label);

}  // namespace tdp

#endif  // TDP_RANKER_H_
