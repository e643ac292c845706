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

// A BERT-style contextual encoder: WordPiece tokenizer, token / position /
// segment embeddings and post-LayerNorm transformer blocks with GELU
// feed-forward layers.
//
// Checkpoints are JSON files:
//
//   {"format": "tdp-contextual",
//    "config": {"hidden": 64, "layers": 2, "heads": 4, "ffn": 256,
//               "max_positions": 128, "lowercase": true},
//    "vocab": ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", ...],
//    "parameters": {"embeddings/word": {...}, ...}}
//
// `tdp init-contextual` writes a randomly initialized checkpoint with a
// vocabulary built from a corpus; tools/convert_bert_checkpoint.py converts
// a pretrained Hugging Face BERT model into the same layout.

#ifndef TDP_CONTEXTUAL_H_
#define TDP_CONTEXTUAL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tdp/nn/graph.h"
#include "tdp/nn/layers.h"

namespace tdp {

class WordPieceVocab {
 public:
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";
  static constexpr std::string_view kMask = "[MASK]";

  WordPieceVocab() = default;
  // `tokens` must contain the special tokens above.
  WordPieceVocab(std::vector<std::string> tokens, bool lowercase);

  // Special tokens, then every character seen (bare and "##"-prefixed),
  // then the most frequent words up to `max_words`.
  static WordPieceVocab Build(std::span<const std::vector<std::string>> sentences,
                              int max_words, bool lowercase);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool lowercase() const { return lowercase_; }
  int Id(std::string_view token) const;  // -1 if absent
  int unk_id() const { return unk_; }
  int cls_id() const { return cls_; }
  int sep_id() const { return sep_; }

  // Greedy longest-match-first split of one word; never empty (a word that
  // cannot be split becomes [UNK]).
  std::vector<int> TokenizeWord(std::string_view word) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  bool lowercase_ = false;
  int unk_ = -1;
  int cls_ = -1;
  int sep_ = -1;
};

struct ContextualConfig {
  int hidden = 64;
  int layers = 2;
  int heads = 4;
  int ffn = 256;
  int max_positions = 128;
  bool lowercase = true;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  static ContextualConfig FromJson(const nlohmann::json& j, const std::string& source);
};

class ContextualModel {
 public:
  // Creates parameters named "<prefix>/..." in `params`.
  ContextualModel(ContextualConfig config, WordPieceVocab vocab,
                  nn::ParameterCollection& params, std::mt19937_64& rng,
                  const std::string& prefix = "contextual");

  const ContextualConfig& config() const { return config_; }
  const WordPieceVocab& vocab() const { return vocab_; }
  const std::string& prefix() const { return prefix_; }
  int hidden() const { return config_.hidden; }

  // Hidden states (hidden x T) for token ids with segment ids in {0, 1}.
  nn::Expr Forward(nn::Graph& g, std::span<const int> ids,
                   std::span<const int> segments) const;

  // One vector per word: the output at the word's first subword, with the
  // sentence framed as [CLS] ... [SEP]. Long sentences are split into
  // windows that fit max_positions. Runs outside any training graph.
  nn::Matrix EmbedWords(std::span<const std::string> words) const;

 private:
  struct Block {
    nn::Linear query, key, value, output;
    nn::LayerNorm attention_norm;
    nn::Linear ffn_in, ffn_out;
    nn::LayerNorm output_norm;
  };

  ContextualConfig config_;
  WordPieceVocab vocab_;
  std::string prefix_;
  nn::Parameter* word_ = nullptr;
  nn::Parameter* position_ = nullptr;
  nn::Parameter* token_type_ = nullptr;
  nn::LayerNorm embedding_norm_;
  std::vector<Block> blocks_;
};

struct ContextualCheckpoint {
  ContextualConfig config;
  WordPieceVocab vocab;
  nlohmann::json parameters;  // keyed relative to the model prefix
};

// Freshly initialized weights for the given vocabulary.
ContextualCheckpoint RandomContextualCheckpoint(const ContextualConfig& config,
                                                WordPieceVocab vocab, std::uint64_t seed);

// Throws ConfigError naming the path for unreadable or malformed files.
ContextualCheckpoint LoadContextualCheckpoint(const std::filesystem::path& path);
void SaveContextualCheckpoint(const std::filesystem::path& path,
                              const ContextualCheckpoint& checkpoint);

}  // namespace tdp

#endif  // TDP_CONTEXTUAL_H_
