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

#include "tdp/ranker.h"

#include <cmath>
#include <fstream>

#include "tdp/errors.h"
#include "tdp/nn/serialize.h"

namespace tdp {

using nlohmann::json;

void RankerConfig::Validate() const {
  window.Validate();
  encoder.Validate();
  if (ff_hidden_dim <= 0) throw ConfigError("ff_hidden_dim must be positive");
}

json RankerConfig::ToJson() const {
  return json{{"window", {{"back", window.back}, {"forward", window.forward}}},
              {"encoder", encoder.ToJson()},
              {"ff_hidden_dim", ff_hidden_dim}};
}

RankerConfig RankerConfig::FromJson(const json& j) {
  RankerConfig c;
  try {
    c.window.back = j.at("window").at("back").get<int>();
    c.window.forward = j.at("window").at("forward").get<int>();
    c.encoder = EncoderConfig::FromJson(j.at("encoder"));
    c.ff_hidden_dim = j.at("ff_hidden_dim").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad ranker config: ") + e.what());
  }
  c.Validate();
  return c;
}

RankerModel::RankerModel(const RankerConfig& config, const EncoderResources& resources,
                         std::uint64_t seed, EncoderStats* stats)
    : config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  encoder_ = CreateEncoder(config_.encoder, config_.window, resources, params_, rng, stats);
  hidden_ = nn::Linear::Create(params_, "ranker/hidden", encoder_->output_dim(),
                               config_.ff_hidden_dim, rng);
  output_ = nn::Linear::Create(params_, "ranker/output", config_.ff_hidden_dim, kNumLabels, rng);
}

nn::Expr RankerModel::ScoreExpr(nn::Graph& g, DocumentState& state, const Document& doc,
                                const CandidateSet& candidates) const {
  const nn::Expr pairs =
      encoder_->EncodePairs(g, state, doc, candidates.child, candidates.candidates);
  const nn::Expr label_scores = output_(g, nn::Tanh(hidden_(g, pairs)));
  std::vector<std::pair<int, int>> entries;
  for (std::size_t j = 0; j < candidates.candidates.size(); ++j) {
    const int parent = candidates.candidates[j];
    for (RelationLabel label :
         LegalLabels(doc.node(candidates.child).kind, doc.node(parent).kind)) {
      entries.emplace_back(static_cast<int>(label), static_cast<int>(j));
    }
  }
  return nn::GatherEntries(label_scores, entries);
}

namespace {

ScoreTable FillTable(const Document& doc, const CandidateSet& candidates, const nn::Matrix& s) {
  ScoreTable table = EmptyScoreTable(doc, candidates);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    table.rows[r].score = s(static_cast<long>(r), 0);
  }
  NormalizeScores(table);
  return table;
}

}  // namespace

ScoreTable RankerModel::ScoreChild(const Document& doc, const CandidateSet& candidates) const {
  nn::Graph g;
  auto state = encoder_->Prepare(g, doc);
  return FillTable(doc, candidates, ScoreExpr(g, *state, doc, candidates).value());
}

std::vector<ScoreTable> RankerModel::ScoreDocument(const Document& doc) const {
  std::vector<ScoreTable> tables;
  if (doc.num_mentions() == 0) return tables;
  nn::Graph g;
  auto state = encoder_->Prepare(g, doc);
  for (int i = 0; i < doc.num_mentions(); ++i) {
    const CandidateSet candidates = GenerateCandidates(doc, i, config_.window);
    tables.push_back(FillTable(doc, candidates, ScoreExpr(g, *state, doc, candidates).value()));
  }
  return tables;
}

DecodeResult RankerModel::Parse(const Document& doc) const {
  const auto tables = ScoreDocument(doc);
  return Decode(doc, tables);
}

void RankerModel::Save(const std::filesystem::path& path) const {
  json j{{"format", "tdp-ranker"},
         {"version", 1},
         {"config", config_.ToJson()},
         {"parameters", nn::ParametersToJson(params_)}};
  if (const WordVocab* vocab = WordVocabOf(*encoder_)) j["word_vocab"] = vocab->words();
  if (const ContextualModel* ctx = ContextualModelOf(*encoder_)) {
    j["contextual"] = {{"config", ctx->config().ToJson()}, {"vocab", ctx->vocab().tokens()}};
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write model checkpoint " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error("failed writing model checkpoint " + path.string());
}

std::unique_ptr<RankerModel> RankerModel::Load(const std::filesystem::path& path) {
  const std::string source = "model checkpoint " + path.string();
  std::ifstream in(path);
  if (!in) throw ConfigError(source + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": not valid JSON (" + e.what() + ")");
  }
  try {
    if (!j.is_object() || j.value("format", "") != "tdp-ranker") {
      throw ConfigError("not a tdp-ranker checkpoint");
    }
    const RankerConfig config = RankerConfig::FromJson(j.at("config"));
    EncoderResources resources;
    if (j.contains("word_vocab")) {
      resources.vocab = WordVocab(j.at("word_vocab").get<std::vector<std::string>>());
    }
    WordVectors placeholder;  // values come from the checkpoint
    placeholder.dim = config.encoder.embedding_dim;
    resources.static_vectors = &placeholder;
    if (UsesContextualModel(config.encoder.variant)) {
      const json& ctx = j.at("contextual");
      ContextualCheckpoint ckpt;
      ckpt.config = ContextualConfig::FromJson(ctx.at("config"), source);
      ckpt.vocab = WordPieceVocab(ctx.at("vocab").get<std::vector<std::string>>(),
                                  ckpt.config.lowercase);
      ckpt.parameters = json::object();
      for (auto it = j.at("parameters").begin(); it != j.at("parameters").end(); ++it) {
        if (it.key().rfind("contextual/", 0) == 0) {
          ckpt.parameters[it.key().substr(11)] = it.value();
        }
      }
      resources.contextual = std::move(ckpt);
    }
    auto model = std::make_unique<RankerModel>(config, resources, 0);
    nn::AssignParameters(model->params_, j.at("parameters"), "", source);
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.find(path.string()) != std::string::npos) throw;
    throw ConfigError(source + ": " + what);
  }
}

int GoldRow(const ScoreTable& table, int parent, RelationLabel label) {
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].parent == parent && table.rows[r].label == label) {
      return static_cast<int>(r);
    }
  }
  throw PreconditionError("gold row (" + std::to_string(parent) + ", " +
                          std::string(LabelName(label)) + ") is not in the table of child " +
                          std::to_string(table.child));
}

double RankingLoss(const ScoreTable& table, int gold_parent, RelationLabel gold_label) {
  const int gold = GoldRow(table, gold_parent, gold_label);
  double max = table.rows[0].score;
  for (const ScoreRow& r : table.rows) max = std::max(max, r.score);
  double z = 0.0;
  for (const ScoreRow& r : table.rows) z += std::exp(r.score - max);
  return std::max(0.0, max + std::log(z) - table.rows[gold].score);
}

}  // namespace tdp
